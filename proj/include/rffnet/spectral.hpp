#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "rffnet/rng.hpp"

namespace rffnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Frozen randomness of a random Fourier feature map
//   z(x) = sqrt(2/s) * [cos(omega_i . x + phase_i)]_{i=1..s}.
// Immutable after construction; safe to share across threads.
struct FourierFeatures {
    Matrix omega;   // s x p, frequency per row
    Vector phases;  // length s, each in [0, 2pi)

    Eigen::Index s() const { return omega.rows(); }
    Eigen::Index p() const { return omega.cols(); }
};

// Fills one frequency vector from the spectral density of the unweighted
// kernel. The default draws i.i.d. standard normals, the spectral density
// of the unit-relevance Gaussian kernel; other shift-invariant kernels can
// plug in their own sampler.
using SpectralSampler = std::function<void(Rng&, Vector&)>;

SpectralSampler gaussian_spectral_sampler();

// Samples s frequencies and phases. Identical (p, s, seed) give bit-identical
// results on every platform.
FourierFeatures sample_features(Eigen::Index p, Eigen::Index s,
                                std::uint64_t seed);
FourierFeatures sample_features(Eigen::Index p, Eigen::Index s,
                                std::uint64_t seed,
                                const SpectralSampler& sampler);

// z(x) for a single (already relevance-scaled) input.
Vector rff_map(const Vector& x, const FourierFeatures& ff);

// Batched feature evaluation; row i of the result is z(U.row(i)).
Matrix feature_matrix(const Matrix& U, const FourierFeatures& ff);

// cos and sin features in one pass: cos_z = sqrt(2/s) cos(A),
// sin_z = sqrt(2/s) sin(A) with A = U omega^T + phases. The sin block feeds
// the relevance gradient.
void feature_matrix_pair(const Matrix& U, const FourierFeatures& ff,
                         Matrix& cos_z, Matrix& sin_z);

// ARD Gaussian kernel exp(-1/2 sum_j lambda_j^2 (x_j - y_j)^2).
double ard_gaussian_kernel(const Vector& x, const Vector& y,
                           const Vector& lambda);

// Monte-Carlo estimate z(lambda o x)^T z(lambda o y) of the ARD kernel.
double approx_kernel(const Vector& x, const Vector& y, const Vector& lambda,
                     const FourierFeatures& ff);

// Rows lambda o omega_i; distributed per the ARD kernel's spectral density.
Matrix scaled_frequency_sample(const FourierFeatures& ff,
                               const Vector& lambda);

using PairKernel = std::function<double(const Vector&, const Vector&)>;

// Exact kernel ridge regression predictor, f(x) = sum_i alpha_i k(x_i, x).
class KrrPredictor {
public:
    KrrPredictor(Matrix X, Vector alpha, PairKernel kernel);

    double operator()(const Vector& x) const;
    Vector predict(const Matrix& X) const;
    const Vector& alpha() const { return alpha_; }

private:
    Matrix X_;
    Vector alpha_;
    PairKernel kernel_;
};

// Dense small-scale solve of (K + n mu I) alpha = y. Test-oracle use only;
// refuses solutions whose relative residual exceeds 1e-8.
KrrPredictor krr_oracle(const Matrix& X, const Vector& y,
                        const PairKernel& kernel, double mu);

}  // namespace rffnet
