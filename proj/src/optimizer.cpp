#include "rffnet/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "rffnet/errors.hpp"

namespace rffnet {

namespace {

// Sub-stream tags under the config seed.
constexpr std::uint64_t kFeatureStream = 0;
constexpr std::uint64_t kShuffleStream = 1;

Matrix gather_rows(const Matrix& X, const std::vector<Eigen::Index>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = X.row(idx[i]);
    return out;
}

Vector gather(const Vector& y, const std::vector<Eigen::Index>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(i) = y(idx[i]);
    return out;
}

}  // namespace

Eigen::Index auto_num_features(Eigen::Index n_train) {
    if (n_train < 1)
        throw ArgumentError("auto_num_features: need at least one sample");
    const double n = static_cast<double>(n_train);
    const double s = std::floor(std::sqrt(n) * std::log(n));
    return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(s));
}

void TrainConfig::validate() const {
    if (!(eta > 0.0)) throw ArgumentError("TrainConfig: eta must be > 0");
    if (mu < 0.0) throw ArgumentError("TrainConfig: mu must be >= 0");
    if (patience < 1) throw ArgumentError("TrainConfig: patience must be >= 1");
    if (max_epochs < 1)
        throw ArgumentError("TrainConfig: max_epochs must be >= 1");
    if (batch_size < 1)
        throw ArgumentError("TrainConfig: batch_size must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw ArgumentError("TrainConfig: val_fraction must lie in (0, 1)");
    if (num_features != kAutoNumFeatures && num_features < 1)
        throw ArgumentError(
            "TrainConfig: num_features must be >= 1 (or auto)");
    if (!(rel_tol >= 0.0))
        throw ArgumentError("TrainConfig: rel_tol must be >= 0");
}

void AdamState::apply(Vector& param, const Vector& grad, double eta) {
    ++step;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double m_corr = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double v_corr = 1.0 - std::pow(beta2, static_cast<double>(step));
    param.array() -= eta * (m.array() / m_corr) /
                     ((v.array() / v_corr).sqrt() + eps);
}

SplitIndices split_train_val_indices(Eigen::Index n, double f,
                                     std::uint64_t seed) {
    if (n < 2)
        throw ArgumentError("split_train_val: need at least 2 samples, got " +
                            std::to_string(n));
    if (!(f > 0.0 && f < 1.0))
        throw ArgumentError("split_train_val: fraction must lie in (0, 1)");

    // Round half up.
    const auto n_val = static_cast<Eigen::Index>(
        std::floor(f * static_cast<double>(n) + 0.5));
    const Eigen::Index n_train = n - n_val;
    if (n_val < 1 || n_train < 1)
        throw ArgumentError("split_train_val: degenerate split (train " +
                            std::to_string(n_train) + ", validation " +
                            std::to_string(n_val) + ")");

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    shuffle(perm, rng);

    SplitIndices split;
    split.train.assign(perm.begin(), perm.begin() + n_train);
    split.val.assign(perm.begin() + n_train, perm.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    return split;
}

SplitData split_train_val(const Matrix& X, const Vector& y, double f,
                          std::uint64_t seed) {
    if (X.rows() != y.size())
        throw ArgumentError("split_train_val: X and y disagree in length");
    const SplitIndices idx = split_train_val_indices(X.rows(), f, seed);
    return SplitData{gather_rows(X, idx.train), gather(y, idx.train),
                     gather_rows(X, idx.val), gather(y, idx.val)};
}

double epoch_step(TrainerState& state, const Matrix& X, const Vector& y,
                  const FourierFeatures& ff, LossKind kind,
                  const TrainConfig& config) {
    config.validate();
    if (X.rows() != y.size() || X.rows() < 1)
        throw ArgumentError("epoch_step: bad training set shape");
    if (X.cols() != ff.p() || state.lambda.size() != ff.p() ||
        state.beta.size() != ff.s())
        throw ArgumentError("epoch_step: state shapes inconsistent with data");

    const Eigen::Index n = X.rows();
    const long epoch_index = state.epoch;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng shuffle_rng(
        derive_seed(derive_seed(config.seed, kShuffleStream),
                    static_cast<std::uint64_t>(epoch_index)));
    shuffle(order, shuffle_rng);

    double loss_sum = 0.0;
    Matrix cos_z, sin_z;
    long batch_index = 0;
    for (Eigen::Index start = 0; start < n;
         start += config.batch_size, ++batch_index) {
        const Eigen::Index m =
            std::min<Eigen::Index>(config.batch_size, n - start);
        const std::vector<Eigen::Index> rows(order.begin() + start,
                                             order.begin() + start + m);
        const Matrix Xb = gather_rows(X, rows);
        const Vector yb = gather(y, rows);
        const double inv_m = 1.0 / static_cast<double>(m);

        // Features depend on lambda only, so one evaluation serves both
        // block updates within the batch.
        const Matrix U =
            Xb.array().rowwise() * state.lambda.transpose().array();
        if (config.freeze_lambda)
            cos_z = feature_matrix(U, ff);
        else
            feature_matrix_pair(U, ff, cos_z, sin_z);

        Vector scores = cos_z * state.beta;
        Vector lprime(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            loss_sum += loss_value(kind, yb(i), scores(i));
            lprime(i) = loss_derivative(kind, yb(i), scores(i));
        }
        if (!std::isfinite(loss_sum))
            throw TrainingError("epoch_step: training loss overflowed",
                                epoch_index + 1, batch_index);

        Vector grad_beta = cos_z.transpose() * lprime * inv_m;
        if (!grad_beta.allFinite())
            throw TrainingError("epoch_step: beta gradient is not finite",
                                epoch_index + 1, batch_index);
        // The regularizer also enters the moment estimate: the prox alone
        // cannot hold the normalized step at the ridge fixed point.
        grad_beta += 2.0 * config.mu * state.beta;
        state.beta_moments.apply(state.beta, grad_beta, config.eta);
        state.beta = prox_l2(state.beta, config.eta, config.mu);

        if (!config.freeze_lambda) {
            // Gauss-Seidel: lambda sees the already-updated beta.
            scores.noalias() = cos_z * state.beta;
            for (Eigen::Index i = 0; i < m; ++i)
                lprime(i) = loss_derivative(kind, yb(i), scores(i));
            const Matrix proj =
                (sin_z.array().rowwise() * state.beta.transpose().array())
                    .matrix() *
                ff.omega;
            Vector grad_lambda =
                (proj.array() * Xb.array()).matrix().transpose() * lprime *
                (-inv_m);
            if (!grad_lambda.allFinite())
                throw TrainingError(
                    "epoch_step: lambda gradient is not finite",
                    epoch_index + 1, batch_index);
            state.lambda_moments.apply(state.lambda, grad_lambda, config.eta);
        }
    }
    ++state.epoch;
    return loss_sum / static_cast<double>(n);
}

FitResult fit_loop(const Matrix& X, const Vector& y, const TrainConfig& config,
                   LossKind kind,
                   const std::optional<std::pair<Vector, Vector>>& init) {
    config.validate();
    if (X.rows() < 1 || X.size() == 0)
        throw ArgumentError("fit_loop: empty training data");
    if (X.rows() != y.size())
        throw ArgumentError("fit_loop: X and y disagree in length");
    validate_targets(kind, y);

    const SplitIndices idx =
        split_train_val_indices(X.rows(), config.val_fraction, config.seed);
    const Matrix X_train = gather_rows(X, idx.train);
    const Vector y_train = gather(y, idx.train);
    const Matrix X_val = gather_rows(X, idx.val);
    const Vector y_val = gather(y, idx.val);

    const Eigen::Index s =
        config.num_features == kAutoNumFeatures
            ? auto_num_features(X_train.rows())
            : static_cast<Eigen::Index>(config.num_features);

    FitResult result;
    result.ff = sample_features(X.cols(), s,
                                derive_seed(config.seed, kFeatureStream));
    result.n_train = X_train.rows();
    result.n_val = X_val.rows();

    Vector beta0 = Vector::Zero(s);
    Vector lambda0 = Vector::Ones(X.cols());
    if (init) {
        if (init->first.size() != s || init->second.size() != X.cols())
            throw ArgumentError(
                "fit_loop: initialization has wrong dimensions (beta " +
                std::to_string(init->first.size()) + " vs " +
                std::to_string(s) + ", lambda " +
                std::to_string(init->second.size()) + " vs " +
                std::to_string(X.cols()) + ")");
        beta0 = init->first;
        lambda0 = init->second;
    }
    TrainerState state(std::move(beta0), std::move(lambda0));

    // Snapshots follow the exact minimum; the patience counter only resets
    // on a relative decrease of at least rel_tol.
    double best_val = std::numeric_limits<double>::infinity();
    double patience_ref = std::numeric_limits<double>::infinity();
    long stale = 0;
    bool have_best = false;

    for (long epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const double train_loss =
            epoch_step(state, X_train, y_train, result.ff, kind, config);
        const double val_loss = objective_value(
            X_val, y_val, ObjectiveParams{state.beta, state.lambda, 0.0},
            result.ff, kind);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        result.history.push_back({epoch, train_loss, val_loss, seconds});

        if (std::isfinite(val_loss) && val_loss < best_val) {
            best_val = val_loss;
            result.beta = state.beta;
            result.lambda = state.lambda;
            result.best_epoch = epoch;
            have_best = true;
        }
        if (std::isfinite(val_loss) &&
            val_loss <= patience_ref * (1.0 - config.rel_tol)) {
            patience_ref = val_loss;
            stale = 0;
        } else {
            ++stale;
        }
        if (stale >= config.patience) break;
    }

    if (!have_best)
        throw NumericError(
            "fit_loop: validation loss never became finite; training "
            "diverged");
    result.best_val_loss = best_val;
    return result;
}

}  // namespace rffnet
