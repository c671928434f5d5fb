#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "rffnet/spectral.hpp"

namespace rffnet {

enum class TaskKind { Regression, BinaryClassification };

struct Dataset {
    Matrix X;
    Vector y;
    std::vector<std::string> feature_names;  // empty when unnamed
    TaskKind task = TaskKind::Regression;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

// Target column selected by header name or by 0-based column index.
using TargetColumn = std::variant<std::string, Eigen::Index>;

// Reads a UTF-8, comma-delimited, header-first CSV. Every non-target column
// becomes a feature, in file order. Non-numeric or non-finite cells and
// ragged rows raise DataError naming the data row and column.
Dataset load_csv(const std::filesystem::path& path,
                 const TargetColumn& target, TaskKind task);

// Writes the same dialect back (target column last, named "y" when the
// dataset carries no explicit name). Deterministic byte-for-byte.
void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::string& target_name = "y");

struct StandardizationStats {
    Vector mean;
    Vector std;  // strictly positive; constant columns get 1
};

// Per-column mean and sample standard deviation (divisor n - 1) from the
// training split only. Columns with identical entries get std = 1.
StandardizationStats standardize_fit(const Matrix& X_train);

Matrix standardize_apply(const Matrix& X, const StandardizationStats& stats);

// Closed-form responses of the synthetic experiments (noiseless part).
double se1_response(const Vector& x);  // sin((x1+x3)^2) sin(x6 x7 x8), p = 18
double se2_response(const Vector& x);  // log((x11+...+x15)^2), p = 100

// Synthetic regression generators; covariates are i.i.d. standard normal,
// noise is Normal(0, sigma). Bit-identical per (n, seed, sigma).
Dataset gen_se1(Eigen::Index n, std::uint64_t seed, double noise_sigma = 0.1);
Dataset gen_se2(Eigen::Index n, std::uint64_t seed, double noise_sigma = 0.1);

struct ThreeWaySizes {
    Eigen::Index n_train;
    Eigen::Index n_val;
    Eigen::Index n_test;
};

struct ThreeWaySplit {
    Dataset train;
    Dataset val;
    Dataset test;
};

// Seeded disjoint row partition; sizes must sum to at most n.
ThreeWaySplit split_threeway(const Dataset& data, const ThreeWaySizes& sizes,
                             std::uint64_t seed);

}  // namespace rffnet
