#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rffnet/objective.hpp"
#include "rffnet/spectral.hpp"

namespace rffnet {

inline constexpr std::int64_t kAutoNumFeatures = -1;

// floor(sqrt(n) * ln(n)) features, at least one. n is the size of the
// training split the model actually optimizes on.
Eigen::Index auto_num_features(Eigen::Index n_train);

struct TrainConfig {
    double eta = 1e-3;        // learning rate for both blocks
    double mu = 1e-5;         // l2 regularization on beta
    long patience = 10;       // epochs without improvement before stopping
    long max_epochs = 300;
    long batch_size = 32;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
    std::int64_t num_features = kAutoNumFeatures;
    double rel_tol = 1e-4;    // relative decrease counting as improvement
    bool freeze_lambda = false;  // keep relevances fixed (diagnostics)

    void validate() const;
};

// Adam-style moment accumulators for one parameter block.
struct AdamState {
    Vector m;  // first moment
    Vector v;  // second moment, componentwise >= 0
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(Eigen::Index dim)
        : m(Vector::Zero(dim)), v(Vector::Zero(dim)) {}

    // One bias-corrected update of `param` against `grad` with step size eta.
    void apply(Vector& param, const Vector& grad, double eta);
};

struct SplitIndices {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> val;
};

// Disjoint exhaustive partition; validation gets round(f * n) rows
// (half up). Deterministic under seed; indices sorted within each part.
SplitIndices split_train_val_indices(Eigen::Index n, double f,
                                     std::uint64_t seed);

struct SplitData {
    Matrix X_train;
    Vector y_train;
    Matrix X_val;
    Vector y_val;
};

SplitData split_train_val(const Matrix& X, const Vector& y, double f,
                          std::uint64_t seed);

// Mutable state carried across epochs.
struct TrainerState {
    Vector beta;
    Vector lambda;
    AdamState beta_moments;
    AdamState lambda_moments;
    long epoch = 0;  // completed epochs

    TrainerState(Vector beta0, Vector lambda0)
        : beta(std::move(beta0)),
          lambda(std::move(lambda0)),
          beta_moments(beta.size()),
          lambda_moments(lambda.size()) {}
};

// One pass over the training set in seeded shuffled minibatches. Per batch:
// beta gets a moment-estimated step on the regularized gradient followed by
// the l2 prox, then the lambda gradient is evaluated at the already-updated
// beta (Gauss-Seidel) and lambda gets its own moment-estimated step.
// Returns the mean (unregularized) training loss accumulated at the
// pre-update parameters.
double epoch_step(TrainerState& state, const Matrix& X, const Vector& y,
                  const FourierFeatures& ff, LossKind kind,
                  const TrainConfig& config);

struct EpochRecord {
    long epoch;         // 1-based
    double train_loss;  // mean loss over the epoch's batches
    double val_loss;    // unregularized mean validation loss
    double seconds;     // wall-clock time of the epoch
};

struct FitResult {
    FourierFeatures ff;
    Vector beta;
    Vector lambda;
    std::vector<EpochRecord> history;
    long best_epoch = 0;
    double best_val_loss = 0.0;
    Eigen::Index n_train = 0;
    Eigen::Index n_val = 0;
};

// Full training loop: split, sample the feature map, run epochs with
// early stopping (patience in epochs, improvement = relative decrease of
// at least rel_tol), return the parameters of the best validation epoch.
FitResult fit_loop(
    const Matrix& X, const Vector& y, const TrainConfig& config,
    LossKind kind,
    const std::optional<std::pair<Vector, Vector>>& init = std::nullopt);

}  // namespace rffnet
