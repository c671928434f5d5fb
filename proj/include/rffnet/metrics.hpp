#pragma once

#include <string>
#include <vector>

#include "rffnet/data.hpp"

namespace rffnet {

double mse(const Vector& y, const Vector& y_hat);

// Fraction of correct predictions at the threshold (proba >= threshold
// predicts the positive class).
double accuracy(const Vector& y, const Vector& proba, double threshold = 0.5);

// 2PR / (P + R). Degenerate cases (no predicted or no actual positives)
// return 0 and set *degenerate when provided.
double f1(const Vector& y, const Vector& proba, double threshold = 0.5,
          bool* degenerate = nullptr);

// Mann-Whitney AUC by average ranks; ties count one half. Requires both
// classes present. Invariant under strictly increasing score transforms.
double auc(const Vector& y, const Vector& scores);

struct EvalReport {
    TaskKind task = TaskKind::Regression;
    std::vector<std::pair<std::string, double>> metrics;
    Eigen::Index n = 0;
    bool f1_degenerate = false;
};

}  // namespace rffnet
