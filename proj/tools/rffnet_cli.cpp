// Command-line front end: synthesize datasets, train, tune, evaluate and
// export feature relevances.
//
// Exit codes: 0 success, 2 usage error, 1 runtime/data error.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "rffnet/data.hpp"
#include "rffnet/errors.hpp"
#include "rffnet/metrics.hpp"
#include "rffnet/model.hpp"
#include "rffnet/tune.hpp"

namespace fs = std::filesystem;
using namespace rffnet;

namespace {

// Flag/semantic problems that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TaskKind parse_task(const std::string& task) {
    if (task == "regression") return TaskKind::Regression;
    if (task == "classification") return TaskKind::BinaryClassification;
    throw UsageError("unknown task '" + task + "'");
}

LossKind loss_for(const std::string& loss, TaskKind task) {
    if (loss == "squared") return LossKind::SquaredError;
    if (loss == "cross-entropy") return LossKind::BinaryCrossEntropy;
    if (!loss.empty()) throw UsageError("unknown loss '" + loss + "'");
    return task == TaskKind::BinaryClassification
               ? LossKind::BinaryCrossEntropy
               : LossKind::SquaredError;
}

// Common dataset / configuration flags shared by train and tune.
struct DataFlags {
    std::string data;
    std::string task = "regression";
    std::string target = "y";
    std::int64_t target_index = -1;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--data", data, "input CSV (header row required)")
            ->required();
        cmd.add_option("--task", task, "regression or classification")
            ->check(CLI::IsMember({"regression", "classification"}));
        cmd.add_option("--target", target,
                       "target column name (default: y)");
        cmd.add_option("--target-index", target_index,
                       "target column by 0-based index (overrides --target)");
    }

    Dataset load() const {
        const TaskKind kind = parse_task(task);
        if (target_index >= 0)
            return load_csv(data, Eigen::Index{target_index}, kind);
        return load_csv(data, target, kind);
    }
};

struct ConfigFlags {
    TrainConfig config;
    std::string loss;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--loss", loss, "squared or cross-entropy")
            ->check(CLI::IsMember({"squared", "cross-entropy"}));
        cmd.add_option("--lr", config.eta, "learning rate");
        cmd.add_option("--reg", config.mu, "l2 regularization on beta");
        cmd.add_option("--patience", config.patience,
                       "early-stopping patience in epochs");
        cmd.add_option("--max-epochs", config.max_epochs, "epoch budget");
        cmd.add_option("--batch-size", config.batch_size, "minibatch size");
        cmd.add_option("--val-fraction", config.val_fraction,
                       "validation fraction in (0,1)");
        cmd.add_option("--num-features", config.num_features,
                       "random feature count (omit for sqrt(n) log n)");
        cmd.add_option("--seed", config.seed, "random seed")
            ->envname("RFFNET_SEED");
    }
};

void write_atomically(const fs::path& path,
                      const std::function<void(const fs::path&)>& writer) {
    const fs::path tmp = path.string() + ".tmp";
    try {
        writer(tmp);
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

void write_history(const fs::path& path, const DataFlags& dataflags,
                   LossKind loss, const Dataset& data, const FitReport& report,
                   double fit_seconds) {
    write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw DataError(path.string() + ": cannot open for writing");
        const TrainConfig& c = report.model.config;
        out << "# rffnet training history\n";
        out << "# data " << dataflags.data << "\n";
        out << "# task " << dataflags.task << "\n";
        out << "# loss "
            << (loss == LossKind::SquaredError ? "squared" : "cross-entropy")
            << "\n";
        out << "# n_total " << data.n() << "\n";
        out << "# n_train " << report.n_train << "\n";
        out << "# n_val " << report.n_val << "\n";
        out << "# p " << data.p() << "\n";
        out << "# num_features " << report.model.s() << "\n";
        out << "# num_features_mode "
            << (c.num_features == kAutoNumFeatures ? "auto" : "explicit")
            << "\n";
        out << "# auto_rule floor(sqrt(n_train)*ln(n_train))\n";
        out << "# eta " << fmt(c.eta) << "\n";
        out << "# mu " << fmt(c.mu) << "\n";
        out << "# patience " << c.patience << "\n";
        out << "# max_epochs " << c.max_epochs << "\n";
        out << "# batch_size " << c.batch_size << "\n";
        out << "# val_fraction " << fmt(c.val_fraction) << "\n";
        out << "# seed " << c.seed << "\n";
        out << "# rng " << report.model.rng_id << "\n";
        out << "# best_epoch " << report.best_epoch << "\n";
        out << "# best_val_loss " << fmt(report.best_val_loss) << "\n";
        out << "# fit_seconds " << fmt(fit_seconds) << "\n";
        out << "# columns: epoch train_loss val_loss seconds\n";
        char line[128];
        for (const EpochRecord& rec : report.history) {
            std::snprintf(line, sizeof line, "%ld %.17g %.17g %.3f\n",
                          rec.epoch, rec.train_loss, rec.val_loss,
                          rec.seconds);
            out << line;
        }
        if (!out) throw DataError(path.string() + ": write failed");
    });
}

int cmd_synth(const std::string& kind, Eigen::Index n, std::uint64_t seed,
              double noise, const std::string& out) {
    Dataset data;
    if (kind == "se1")
        data = gen_se1(n, seed, noise);
    else
        data = gen_se2(n, seed, noise);
    write_atomically(out, [&](const fs::path& tmp) { write_csv(tmp, data); });
    std::cout << "wrote " << out << " (" << data.n() << " rows, " << data.p()
              << " features)\n";
    return 0;
}

int cmd_train(const DataFlags& dataflags, const ConfigFlags& configflags,
              const std::string& out, std::string history_path) {
    const Dataset data = dataflags.load();
    const LossKind loss = loss_for(configflags.loss, data.task);

    const auto t0 = std::chrono::steady_clock::now();
    const FitReport report = fit(data.X, data.y, configflags.config, loss);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    write_atomically(out,
                     [&](const fs::path& tmp) { save(report.model, tmp); });
    if (history_path.empty()) history_path = out + ".history";
    write_history(history_path, dataflags, loss, data, report, seconds);

    std::cout << "num_features=" << report.model.s() << "\n"
              << "epochs_run=" << report.history.size() << "\n"
              << "best_epoch=" << report.best_epoch << "\n"
              << "best_val_loss=" << fmt(report.best_val_loss) << "\n"
              << "fit_seconds=" << fmt(seconds) << "\n"
              << "model=" << out << "\n"
              << "history=" << history_path << "\n";
    return 0;
}

int cmd_tune(const DataFlags& dataflags, const ConfigFlags& configflags,
             const TuneGrid& grid, const std::string& out) {
    const Dataset data = dataflags.load();
    const LossKind loss = loss_for(configflags.loss, data.task);
    const TuneResult result =
        tune_grid(data, configflags.config, loss, grid);

    const bool classification = data.task == TaskKind::BinaryClassification;
    std::ostringstream report;
    report << "# rffnet tune report\n";
    report << "# data " << dataflags.data << "\n";
    report << "# task " << dataflags.task << "\n";
    report << "# criterion " << (classification ? "auc" : "mse") << "\n";
    report << "# seed " << configflags.config.seed << "\n";
    report << "# n_train " << result.n_train << "\n";
    report << "# n_val " << result.n_val << "\n";
    report << "# columns: lr reg score status\n";
    for (const TuneCell& cell : result.cells) {
        report << fmt(cell.eta) << ' ' << fmt(cell.mu) << ' '
               << (cell.failed ? "nan" : fmt(cell.score)) << ' '
               << (cell.failed ? "failed" : "ok") << "\n";
        if (cell.failed)
            std::cerr << "cell lr=" << fmt(cell.eta) << " reg="
                      << fmt(cell.mu) << " failed: " << cell.error << "\n";
    }
    const TuneCell& best = result.cells[result.winner];
    report << "# winner lr=" << fmt(best.eta) << " reg=" << fmt(best.mu)
           << " score=" << fmt(best.score) << "\n";

    if (!out.empty())
        write_atomically(out, [&](const fs::path& tmp) {
            std::ofstream file(tmp, std::ios::binary);
            file << report.str();
            if (!file)
                throw DataError(out + ": write failed");
        });
    std::cout << report.str();
    return 0;
}

int cmd_eval(const std::string& model_path, const DataFlags& dataflags,
             const std::string& task_flag, const std::string& out) {
    const ModelState model = load(model_path);
    const bool classification = model.loss == LossKind::BinaryCrossEntropy;
    if (!task_flag.empty()) {
        const TaskKind requested = parse_task(task_flag);
        if ((requested == TaskKind::BinaryClassification) != classification)
            throw UsageError(
                "model loss does not match --task (model is " +
                std::string(classification ? "classification" : "regression") +
                ")");
    }

    DataFlags flags = dataflags;
    flags.task = classification ? "classification" : "regression";
    const Dataset data = flags.load();

    EvalReport report;
    report.task = classification ? TaskKind::BinaryClassification
                                 : TaskKind::Regression;
    report.n = data.n();
    if (classification) {
        const Vector proba = predict_proba(model, data.X);
        bool degenerate = false;
        report.metrics.emplace_back("accuracy", accuracy(data.y, proba));
        report.metrics.emplace_back("f1", f1(data.y, proba, 0.5, &degenerate));
        report.metrics.emplace_back("auc", auc(data.y, predict(model, data.X)));
        report.f1_degenerate = degenerate;
    } else {
        report.metrics.emplace_back("mse", mse(data.y, predict(model, data.X)));
    }

    std::ostringstream lines;
    lines << "n=" << report.n << "\n";
    for (const auto& [name, value] : report.metrics)
        lines << name << "=" << fmt(value) << "\n";
    if (report.f1_degenerate) lines << "f1_degenerate=true\n";

    if (!out.empty())
        write_atomically(out, [&](const fs::path& tmp) {
            std::ofstream file(tmp, std::ios::binary);
            file << lines.str();
            if (!file) throw DataError(out + ": write failed");
        });
    std::cout << lines.str();
    return 0;
}

int cmd_relevances(const std::string& model_path, const std::string& out) {
    const ModelState model = load(model_path);
    const Vector rel = relevances(model);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(rel.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Descending by relevance, ties by feature index.
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                         return rel(a) > rel(b);
                     });

    std::ostringstream lines;
    for (const Eigen::Index j : order)
        lines << "f" << (j + 1) << ' ' << fmt(rel(j)) << "\n";

    if (!out.empty())
        write_atomically(out, [&](const fs::path& tmp) {
            std::ofstream file(tmp, std::ios::binary);
            file << lines.str();
            if (!file) throw DataError(out + ": write failed");
        });
    std::cout << lines.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RFFNet: interpretable kernel learning with random Fourier "
                 "features"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string synth_kind;
    Eigen::Index synth_n = 1000;
    std::uint64_t synth_seed = 0;
    double synth_noise = 0.1;
    std::string synth_out;
    synth->add_option("--kind", synth_kind, "se1 or se2")
        ->required()
        ->check(CLI::IsMember({"se1", "se2"}));
    synth->add_option("--n", synth_n, "number of rows")->required();
    synth->add_option("--seed", synth_seed, "random seed")
        ->envname("RFFNET_SEED");
    synth->add_option("--noise", synth_noise, "noise standard deviation");
    synth->add_option("--out", synth_out, "output CSV path")->required();

    // train
    auto* train = app.add_subcommand("train", "fit a model");
    DataFlags train_data;
    ConfigFlags train_config;
    std::string train_out, train_history;
    train_data.add_to(*train);
    train_config.add_to(*train);
    train->add_option("--out", train_out, "model output path")->required();
    train->add_option("--history", train_history,
                      "history output path (default: <out>.history)");

    // tune
    auto* tune = app.add_subcommand("tune", "grid-search lr and reg");
    DataFlags tune_data;
    ConfigFlags tune_config;
    TuneGrid grid;
    std::string tune_out;
    tune_data.add_to(*tune);
    tune_config.add_to(*tune);
    tune->add_option("--lrs", grid.learning_rates, "learning-rate grid")
        ->delimiter(',');
    tune->add_option("--regs", grid.regularizations, "regularization grid")
        ->delimiter(',');
    tune->add_option("--out", tune_out, "report output path");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a model on a dataset");
    DataFlags eval_data;
    std::string eval_model, eval_out;
    eval->add_option("--model", eval_model, "model file")->required();
    eval_data.add_to(*eval);
    eval->add_option("--out", eval_out, "report output path");

    // relevances
    auto* rel = app.add_subcommand("relevances",
                                   "export scaled feature relevances");
    std::string rel_model, rel_out;
    rel->add_option("--model", rel_model, "model file")->required();
    rel->add_option("--out", rel_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed())
            return cmd_synth(synth_kind, synth_n, synth_seed, synth_noise,
                             synth_out);
        if (train->parsed())
            return cmd_train(train_data, train_config, train_out,
                             train_history);
        if (tune->parsed())
            return cmd_tune(tune_data, tune_config, grid, tune_out);
        if (eval->parsed()) {
            // --task is only a cross-check here; the model decides.
            const std::string task_flag =
                eval->count("--task") > 0 ? eval_data.task : "";
            return cmd_eval(eval_model, eval_data, task_flag, eval_out);
        }
        if (rel->parsed()) return cmd_relevances(rel_model, rel_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
