#pragma once

#include <string>
#include <vector>

#include "rffnet/model.hpp"

namespace rffnet {

// Grid of (learning rate, regularization) pairs evaluated exhaustively.
struct TuneGrid {
    std::vector<double> learning_rates{1e-5, 1e-4, 1e-3, 1e-2};
    std::vector<double> regularizations{1e-7, 1e-6, 1e-5, 1e-4,
                                        1e-3, 1e-2, 1e-1};

    void validate() const;
};

struct TuneCell {
    double eta = 0.0;
    double mu = 0.0;
    double score = 0.0;  // validation MSE (regression) or AUC (classification)
    bool failed = false;
    std::string error;
};

struct TuneResult {
    std::vector<TuneCell> cells;  // row-major: eta outer, mu inner
    std::size_t winner = 0;       // index into cells
    Eigen::Index n_train = 0;
    Eigen::Index n_val = 0;
};

// Lower MSE wins for regression, higher AUC for classification; exact ties
// go to the smaller mu, then the smaller eta. Throws if every cell failed.
std::size_t select_winner(const std::vector<TuneCell>& cells, TaskKind task);

// Splits once by (val_fraction, seed), trains one model per grid cell on
// the training part (all cells share the base seed) and scores it on the
// held-out part. A failed cell is recorded and tuning continues.
TuneResult tune_grid(const Dataset& data, const TrainConfig& base,
                     LossKind loss, const TuneGrid& grid);

}  // namespace rffnet
