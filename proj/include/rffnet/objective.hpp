#pragma once

#include "rffnet/spectral.hpp"

namespace rffnet {

enum class LossKind {
    SquaredError,        // (y - score)^2, real targets
    BinaryCrossEntropy,  // logistic loss on a raw score, targets in {0, 1}
};

// Parameters of the regularized objective
//   (1/n) sum_i loss(y_i, beta . z(lambda o x_i)) + mu ||beta||^2.
struct ObjectiveParams {
    Vector beta;    // length s
    Vector lambda;  // length p
    double mu = 0.0;
};

// Numerically stable logistic function.
double sigmoid(double score);

double loss_value(LossKind kind, double y, double score);

// d loss / d score. For BinaryCrossEntropy this is sigmoid(score) - y.
double loss_derivative(LossKind kind, double y, double score);

// Throws DataError if any target is outside the loss's admissible set.
void validate_targets(LossKind kind, const Vector& y);

// Full objective; pass params.mu = 0 for the unregularized data term.
double objective_value(const Matrix& X, const Vector& y,
                       const ObjectiveParams& params,
                       const FourierFeatures& ff, LossKind kind);

struct Gradients {
    Vector beta;    // d/d beta of the data term
    Vector lambda;  // d/d lambda of the data term
};

// Gradients of the data term only; the mu ||beta||^2 part is handled by the
// proximal step, not here.
Gradients gradients(const Matrix& X, const Vector& y,
                    const ObjectiveParams& params, const FourierFeatures& ff,
                    LossKind kind);

// prox of mu||.||^2 with step eta: componentwise shrink v / (1 + 2 eta mu).
Vector prox_l2(const Vector& v, double eta, double mu);

}  // namespace rffnet
