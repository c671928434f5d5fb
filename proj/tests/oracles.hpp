// Independent reference implementations used as test oracles. Everything
// here is deliberately written the slow, obvious way and must stay
// independent of the library code paths it checks.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rffnet/objective.hpp"
#include "rffnet/spectral.hpp"

namespace oracle {

using rffnet::Matrix;
using rffnet::Vector;

// O(n+ * n-) AUC: count wins, ties one half.
inline double brute_force_auc(const Vector& y, const Vector& scores) {
    double wins = 0.0;
    long n_pos = 0, n_neg = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) != 1.0) continue;
        ++n_pos;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            if (y(j) != 0.0) continue;
            if (scores(i) > scores(j))
                wins += 1.0;
            else if (scores(i) == scores(j))
                wins += 0.5;
        }
    }
    for (Eigen::Index j = 0; j < y.size(); ++j)
        if (y(j) == 0.0) ++n_neg;
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Central finite difference of a scalar functional.
inline Vector finite_difference(const std::function<double(const Vector&)>& f,
                                const Vector& at, double step = 1e-6) {
    Vector grad(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) {
        Vector hi = at, lo = at;
        hi(i) += step;
        lo(i) -= step;
        grad(i) = (f(hi) - f(lo)) / (2.0 * step);
    }
    return grad;
}

// Plain Gaussian elimination with partial pivoting; independent of Eigen's
// decompositions.
inline Vector gaussian_solve(Matrix A, Vector b) {
    const Eigen::Index n = A.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(pivot, col))) pivot = r;
        if (pivot != col) {
            A.row(pivot).swap(A.row(col));
            std::swap(b(pivot), b(col));
        }
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const double factor = A(r, col) / A(col, col);
            A.row(r) -= factor * A.row(col);
            b(r) -= factor * b(col);
        }
    }
    Vector x(n);
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        double acc = b(r);
        for (Eigen::Index c = r + 1; c < n; ++c) acc -= A(r, c) * x(c);
        x(r) = acc / A(r, r);
    }
    return x;
}

// Objective of the training problem, coded one sample at a time from the
// definition.
inline double naive_objective(const Matrix& X, const Vector& y,
                              const Vector& beta, const Vector& lambda,
                              double mu, const rffnet::FourierFeatures& ff,
                              rffnet::LossKind kind) {
    const double scale = std::sqrt(2.0 / static_cast<double>(ff.s()));
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double score = 0.0;
        for (Eigen::Index k = 0; k < ff.s(); ++k) {
            double arg = ff.phases(k);
            for (Eigen::Index j = 0; j < X.cols(); ++j)
                arg += ff.omega(k, j) * lambda(j) * X(i, j);
            score += beta(k) * scale * std::cos(arg);
        }
        total += rffnet::loss_value(kind, y(i), score);
    }
    return total / static_cast<double>(X.rows()) + mu * beta.squaredNorm();
}

// Closed-form minimizer of (1/n)||y - Z beta||^2 + mu ||beta||^2.
inline Vector ridge_closed_form(const Matrix& Z, const Vector& y, double mu) {
    const double n = static_cast<double>(Z.rows());
    Matrix A = Z.transpose() * Z / n;
    A.diagonal().array() += mu;
    return A.ldlt().solve(Z.transpose() * y / n);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols,
                            rffnet::Rng& rng, double sd = 1.0) {
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = sd * rng.normal();
    return M;
}

inline Vector random_vector(Eigen::Index size, rffnet::Rng& rng,
                            double sd = 1.0) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = sd * rng.normal();
    return v;
}

}  // namespace oracle
