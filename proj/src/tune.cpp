#include "rffnet/tune.hpp"

#include <cmath>

#include "rffnet/errors.hpp"
#include "rffnet/metrics.hpp"

namespace rffnet {

void TuneGrid::validate() const {
    if (learning_rates.empty() || regularizations.empty())
        throw ArgumentError("tune: grid lists must be non-empty");
    for (const double lr : learning_rates)
        if (!(lr > 0.0))
            throw ArgumentError("tune: learning rates must be positive");
    for (const double reg : regularizations)
        if (!(reg > 0.0))
            throw ArgumentError("tune: regularizations must be positive");
}

std::size_t select_winner(const std::vector<TuneCell>& cells, TaskKind task) {
    const bool maximize = task == TaskKind::BinaryClassification;
    bool found = false;
    std::size_t best = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const TuneCell& c = cells[i];
        if (c.failed || !std::isfinite(c.score)) continue;
        if (!found) {
            best = i;
            found = true;
            continue;
        }
        const TuneCell& b = cells[best];
        const bool better = maximize ? c.score > b.score : c.score < b.score;
        const bool tie = c.score == b.score;
        if (better ||
            (tie && (c.mu < b.mu || (c.mu == b.mu && c.eta < b.eta))))
            best = i;
    }
    if (!found) throw NumericError("tune: every grid cell failed");
    return best;
}

TuneResult tune_grid(const Dataset& data, const TrainConfig& base,
                     LossKind loss, const TuneGrid& grid) {
    grid.validate();
    base.validate();

    const SplitData split =
        split_train_val(data.X, data.y, base.val_fraction, base.seed);

    TuneResult result;
    result.n_train = split.X_train.rows();
    result.n_val = split.X_val.rows();
    result.cells.reserve(grid.learning_rates.size() *
                         grid.regularizations.size());

    for (const double lr : grid.learning_rates) {
        for (const double reg : grid.regularizations) {
            TuneCell cell;
            cell.eta = lr;
            cell.mu = reg;
            try {
                TrainConfig config = base;
                config.eta = lr;
                config.mu = reg;
                const FitReport report =
                    fit(split.X_train, split.y_train, config, loss);
                if (data.task == TaskKind::BinaryClassification)
                    cell.score = auc(split.y_val,
                                     predict(report.model, split.X_val));
                else
                    cell.score =
                        mse(split.y_val, predict(report.model, split.X_val));
            } catch (const Error& e) {
                cell.failed = true;
                cell.error = e.what();
            }
            result.cells.push_back(std::move(cell));
        }
    }
    result.winner = select_winner(result.cells, data.task);
    return result;
}

}  // namespace rffnet
