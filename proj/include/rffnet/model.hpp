#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "rffnet/data.hpp"
#include "rffnet/optimizer.hpp"

namespace rffnet {

inline constexpr std::uint8_t kModelFormatVersion = 1;

// Everything needed to predict on raw (unstandardized) inputs.
struct ModelState {
    FourierFeatures ff;
    Vector beta;
    Vector lambda;
    LossKind loss = LossKind::SquaredError;
    StandardizationStats stats;  // from the training split
    TrainConfig config;          // echo of the fitting configuration
    std::string rng_id = kRngId;

    Eigen::Index p() const { return ff.p(); }
    Eigen::Index s() const { return ff.s(); }
};

struct FitReport {
    ModelState model;
    std::vector<EpochRecord> history;
    long best_epoch = 0;
    double best_val_loss = 0.0;
    Eigen::Index n_train = 0;
    Eigen::Index n_val = 0;
};

// Standardizes by training-split statistics, samples the feature map
// (auto-sized unless overridden) and runs the training loop. The optional
// init overrides the (beta = 0, lambda = 1) starting point.
FitReport fit(
    const Matrix& X, const Vector& y, const TrainConfig& config,
    LossKind loss,
    const std::optional<std::pair<Vector, Vector>>& init = std::nullopt);

// Raw scores: regression predictions, or logits for classification models.
Vector predict(const ModelState& model, const Matrix& X);
double predict_one(const ModelState& model, const Vector& x);

// sigmoid(score); only valid for cross-entropy models.
Vector predict_proba(const ModelState& model, const Matrix& X);

// |lambda| / max |lambda| in [0, 1]; all zeros when lambda == 0.
Vector relevances(const ModelState& model);

// Versioned little-endian binary container; round-trips bit-exactly.
void save(const ModelState& model, const std::filesystem::path& path);
ModelState load(const std::filesystem::path& path);

}  // namespace rffnet
