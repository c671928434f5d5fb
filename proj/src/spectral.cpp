#include "rffnet/spectral.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "rffnet/errors.hpp"

namespace rffnet {

namespace {

// cos/sin of the phased projections share one argument; glibc's sincos
// evaluates both at roughly the cost of one call.
inline void sin_cos(double a, double& s, double& c) {
#if defined(__GLIBC__)
    ::sincos(a, &s, &c);
#else
    s = std::sin(a);
    c = std::cos(a);
#endif
}

void check_pair_dims(const Vector& x, const Vector& y, const Vector& lambda) {
    if (x.size() != y.size() || x.size() != lambda.size())
        throw ArgumentError("kernel inputs disagree in dimension: x has " +
                            std::to_string(x.size()) + ", y has " +
                            std::to_string(y.size()) + ", lambda has " +
                            std::to_string(lambda.size()));
}

}  // namespace

SpectralSampler gaussian_spectral_sampler() {
    return [](Rng& rng, Vector& freq) {
        for (Eigen::Index j = 0; j < freq.size(); ++j) freq(j) = rng.normal();
    };
}

FourierFeatures sample_features(Eigen::Index p, Eigen::Index s,
                                std::uint64_t seed) {
    return sample_features(p, s, seed, gaussian_spectral_sampler());
}

FourierFeatures sample_features(Eigen::Index p, Eigen::Index s,
                                std::uint64_t seed,
                                const SpectralSampler& sampler) {
    if (p < 1)
        throw ArgumentError("sample_features: input dimension must be >= 1, got " +
                            std::to_string(p));
    if (s < 1)
        throw ArgumentError("sample_features: feature count must be >= 1, got " +
                            std::to_string(s));

    Rng rng(seed);
    FourierFeatures ff;
    ff.omega.resize(s, p);
    Vector freq(p);
    for (Eigen::Index i = 0; i < s; ++i) {
        sampler(rng, freq);
        ff.omega.row(i) = freq.transpose();
    }
    ff.phases.resize(s);
    for (Eigen::Index i = 0; i < s; ++i)
        ff.phases(i) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return ff;
}

Vector rff_map(const Vector& x, const FourierFeatures& ff) {
    if (x.size() != ff.p())
        throw ArgumentError("rff_map: input has dimension " +
                            std::to_string(x.size()) + ", feature map expects " +
                            std::to_string(ff.p()));
    const double scale = std::sqrt(2.0 / static_cast<double>(ff.s()));
    Vector z = ff.omega * x + ff.phases;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = scale * std::cos(z(i));
    return z;
}

Matrix feature_matrix(const Matrix& U, const FourierFeatures& ff) {
    if (U.cols() != ff.p())
        throw ArgumentError("feature_matrix: inputs have " +
                            std::to_string(U.cols()) +
                            " columns, feature map expects " +
                            std::to_string(ff.p()));
    const double scale = std::sqrt(2.0 / static_cast<double>(ff.s()));
    Matrix A = U * ff.omega.transpose();
    A.rowwise() += ff.phases.transpose();
    const Eigen::Index cols = A.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < cols; ++k) {
        double* col = A.col(k).data();
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            col[i] = scale * std::cos(col[i]);
    }
    return A;
}

void feature_matrix_pair(const Matrix& U, const FourierFeatures& ff,
                         Matrix& cos_z, Matrix& sin_z) {
    if (U.cols() != ff.p())
        throw ArgumentError("feature_matrix_pair: inputs have " +
                            std::to_string(U.cols()) +
                            " columns, feature map expects " +
                            std::to_string(ff.p()));
    const double scale = std::sqrt(2.0 / static_cast<double>(ff.s()));
    cos_z = U * ff.omega.transpose();
    cos_z.rowwise() += ff.phases.transpose();
    sin_z.resize(cos_z.rows(), cos_z.cols());
    const Eigen::Index cols = cos_z.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < cols; ++k) {
        double* c = cos_z.col(k).data();
        double* s = sin_z.col(k).data();
        for (Eigen::Index i = 0; i < cos_z.rows(); ++i) {
            double si, ci;
            sin_cos(c[i], si, ci);
            c[i] = scale * ci;
            s[i] = scale * si;
        }
    }
}

double ard_gaussian_kernel(const Vector& x, const Vector& y,
                           const Vector& lambda) {
    check_pair_dims(x, y, lambda);
    double q = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double d = lambda(j) * (x(j) - y(j));
        q += d * d;
    }
    return std::exp(-0.5 * q);
}

double approx_kernel(const Vector& x, const Vector& y, const Vector& lambda,
                     const FourierFeatures& ff) {
    check_pair_dims(x, y, lambda);
    if (x.size() != ff.p())
        throw ArgumentError("approx_kernel: inputs have dimension " +
                            std::to_string(x.size()) +
                            ", feature map expects " + std::to_string(ff.p()));
    const Vector zx = rff_map(lambda.cwiseProduct(x), ff);
    const Vector zy = rff_map(lambda.cwiseProduct(y), ff);
    return zx.dot(zy);
}

Matrix scaled_frequency_sample(const FourierFeatures& ff,
                               const Vector& lambda) {
    if (lambda.size() != ff.p())
        throw ArgumentError("scaled_frequency_sample: lambda has dimension " +
                            std::to_string(lambda.size()) +
                            ", feature map expects " + std::to_string(ff.p()));
    return ff.omega.array().rowwise() * lambda.transpose().array();
}

KrrPredictor::KrrPredictor(Matrix X, Vector alpha, PairKernel kernel)
    : X_(std::move(X)), alpha_(std::move(alpha)), kernel_(std::move(kernel)) {}

double KrrPredictor::operator()(const Vector& x) const {
    double f = 0.0;
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
        f += alpha_(i) * kernel_(X_.row(i).transpose(), x);
    return f;
}

Vector KrrPredictor::predict(const Matrix& X) const {
    Vector out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out(i) = (*this)(X.row(i).transpose());
    return out;
}

KrrPredictor krr_oracle(const Matrix& X, const Vector& y,
                        const PairKernel& kernel, double mu) {
    if (X.rows() != y.size())
        throw ArgumentError("krr_oracle: X has " + std::to_string(X.rows()) +
                            " rows but y has " + std::to_string(y.size()) +
                            " entries");
    if (X.rows() < 1) throw ArgumentError("krr_oracle: empty training set");
    if (!(mu > 0.0)) throw ArgumentError("krr_oracle: mu must be positive");

    const Eigen::Index n = X.rows();
    Matrix K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double k =
                kernel(X.row(i).transpose(), X.row(j).transpose());
            K(i, j) = k;
            K(j, i) = k;
        }
    }
    Matrix system = K;
    system.diagonal().array() += static_cast<double>(n) * mu;

    const Vector alpha = system.ldlt().solve(y);
    const double residual = (system * alpha - y).norm();
    const double scale = y.norm();
    if (!alpha.allFinite() || residual > 1e-8 * (scale > 0.0 ? scale : 1.0))
        throw NumericError(
            "krr_oracle: linear system solve exceeded residual tolerance "
            "(relative residual " +
            std::to_string(scale > 0.0 ? residual / scale : residual) + ")");

    return KrrPredictor(X, alpha, kernel);
}

}  // namespace rffnet
