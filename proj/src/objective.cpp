#include "rffnet/objective.hpp"

#include <algorithm>
#include <cmath>

#include "rffnet/errors.hpp"

namespace rffnet {

namespace {

void check_shapes(const Matrix& X, const Vector& y,
                  const ObjectiveParams& params, const FourierFeatures& ff,
                  const char* where) {
    if (X.rows() != y.size())
        throw ArgumentError(std::string(where) + ": X has " +
                            std::to_string(X.rows()) + " rows but y has " +
                            std::to_string(y.size()) + " entries");
    if (X.rows() < 1)
        throw ArgumentError(std::string(where) + ": empty sample");
    if (X.cols() != ff.p() || params.lambda.size() != ff.p())
        throw ArgumentError(std::string(where) +
                            ": feature dimension mismatch (X: " +
                            std::to_string(X.cols()) + ", lambda: " +
                            std::to_string(params.lambda.size()) +
                            ", map: " + std::to_string(ff.p()) + ")");
    if (params.beta.size() != ff.s())
        throw ArgumentError(std::string(where) + ": beta has " +
                            std::to_string(params.beta.size()) +
                            " entries, feature map has " +
                            std::to_string(ff.s()));
    if (params.mu < 0.0)
        throw ArgumentError(std::string(where) + ": mu must be >= 0");
}

// Row blocks keep the n x s intermediates bounded (~32 MB at s = 4096).
Eigen::Index row_block(Eigen::Index n, Eigen::Index s) {
    const Eigen::Index target = (1 << 22) / std::max<Eigen::Index>(s, 1);
    return std::clamp<Eigen::Index>(target, 1, n);
}

}  // namespace

double sigmoid(double score) {
    if (score >= 0.0) return 1.0 / (1.0 + std::exp(-score));
    const double e = std::exp(score);
    return e / (1.0 + e);
}

double loss_value(LossKind kind, double y, double score) {
    switch (kind) {
        case LossKind::SquaredError: {
            const double r = y - score;
            return r * r;
        }
        case LossKind::BinaryCrossEntropy: {
            if (y != 0.0 && y != 1.0)
                throw ArgumentError(
                    "loss_value: cross-entropy target must be 0 or 1, got " +
                    std::to_string(y));
            // max(s,0) - s y + log(1 + exp(-|s|)) never overflows.
            return std::max(score, 0.0) - score * y +
                   std::log1p(std::exp(-std::abs(score)));
        }
    }
    throw ArgumentError("loss_value: unknown loss kind");
}

double loss_derivative(LossKind kind, double y, double score) {
    switch (kind) {
        case LossKind::SquaredError:
            return 2.0 * (score - y);
        case LossKind::BinaryCrossEntropy:
            if (y != 0.0 && y != 1.0)
                throw ArgumentError(
                    "loss_derivative: cross-entropy target must be 0 or 1, "
                    "got " +
                    std::to_string(y));
            return sigmoid(score) - y;
    }
    throw ArgumentError("loss_derivative: unknown loss kind");
}

void validate_targets(LossKind kind, const Vector& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y(i)))
            throw DataError("target at row " + std::to_string(i + 1) +
                            " is not finite");
        if (kind == LossKind::BinaryCrossEntropy && y(i) != 0.0 && y(i) != 1.0)
            throw DataError("cross-entropy target at row " +
                            std::to_string(i + 1) + " must be 0 or 1, got " +
                            std::to_string(y(i)));
    }
}

double objective_value(const Matrix& X, const Vector& y,
                       const ObjectiveParams& params,
                       const FourierFeatures& ff, LossKind kind) {
    check_shapes(X, y, params, ff, "objective_value");
    validate_targets(kind, y);

    const Eigen::Index n = X.rows();
    const Eigen::Index block = row_block(n, ff.s());
    Vector losses(n);
    for (Eigen::Index start = 0; start < n; start += block) {
        const Eigen::Index m = std::min(block, n - start);
        const Matrix U = X.middleRows(start, m).array().rowwise() *
                         params.lambda.transpose().array();
        const Vector scores = feature_matrix(U, ff) * params.beta;
        for (Eigen::Index i = 0; i < m; ++i)
            losses(start + i) = loss_value(kind, y(start + i), scores(i));
    }
    // Fixed-order reduction keeps the value independent of block size.
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += losses(i);
    return total / static_cast<double>(n) +
           params.mu * params.beta.squaredNorm();
}

Gradients gradients(const Matrix& X, const Vector& y,
                    const ObjectiveParams& params, const FourierFeatures& ff,
                    LossKind kind) {
    check_shapes(X, y, params, ff, "gradients");
    validate_targets(kind, y);

    const Eigen::Index n = X.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    Gradients g;
    g.beta = Vector::Zero(ff.s());
    g.lambda = Vector::Zero(ff.p());

    const Eigen::Index block = row_block(n, ff.s());
    Matrix cos_z, sin_z;
    for (Eigen::Index start = 0; start < n; start += block) {
        const Eigen::Index m = std::min(block, n - start);
        const auto Xb = X.middleRows(start, m);
        const Matrix U =
            Xb.array().rowwise() * params.lambda.transpose().array();
        feature_matrix_pair(U, ff, cos_z, sin_z);

        const Vector scores = cos_z * params.beta;
        Vector lprime(m);
        for (Eigen::Index i = 0; i < m; ++i)
            lprime(i) = loss_derivative(kind, y(start + i), scores(i));

        g.beta.noalias() += cos_z.transpose() * lprime;

        // d score_i / d lambda_j =
        //   -sum_k beta_k sin_z(i,k) omega(k,j) x(i,j)
        const Matrix proj =
            (sin_z.array().rowwise() * params.beta.transpose().array())
                .matrix() *
            ff.omega;
        g.lambda.noalias() -=
            (proj.array() * Xb.array()).matrix().transpose() * lprime;
    }
    g.beta *= inv_n;
    g.lambda *= inv_n;
    return g;
}

Vector prox_l2(const Vector& v, double eta, double mu) {
    if (!(eta > 0.0))
        throw ArgumentError("prox_l2: step size must be positive, got " +
                            std::to_string(eta));
    if (mu < 0.0)
        throw ArgumentError("prox_l2: mu must be >= 0, got " +
                            std::to_string(mu));
    return v / (1.0 + 2.0 * eta * mu);
}

}  // namespace rffnet
