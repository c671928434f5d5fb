#include "rffnet/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "rffnet/errors.hpp"

namespace rffnet {

namespace {

void check_lengths(const Vector& a, const Vector& b, const char* where) {
    if (a.size() != b.size())
        throw ArgumentError(std::string(where) + ": length mismatch (" +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    if (a.size() < 1)
        throw ArgumentError(std::string(where) + ": empty input");
}

void check_binary(const Vector& y, const char* where) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0.0 && y(i) != 1.0)
            throw ArgumentError(std::string(where) +
                                ": labels must be 0 or 1");
}

}  // namespace

double mse(const Vector& y, const Vector& y_hat) {
    check_lengths(y, y_hat, "mse");
    return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

double accuracy(const Vector& y, const Vector& proba, double threshold) {
    check_lengths(y, proba, "accuracy");
    check_binary(y, "accuracy");
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double pred = proba(i) >= threshold ? 1.0 : 0.0;
        if (pred == y(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

double f1(const Vector& y, const Vector& proba, double threshold,
          bool* degenerate) {
    check_lengths(y, proba, "f1");
    check_binary(y, "f1");
    long tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const bool pred = proba(i) >= threshold;
        if (pred && y(i) == 1.0) ++tp;
        if (pred && y(i) == 0.0) ++fp;
        if (!pred && y(i) == 1.0) ++fn;
    }
    if (degenerate) *degenerate = false;
    if (tp + fp == 0 || tp + fn == 0) {
        // No predicted positives or no actual positives: P or R undefined.
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall =
        static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double auc(const Vector& y, const Vector& scores) {
    check_lengths(y, scores, "auc");
    check_binary(y, "auc");
    const auto n = y.size();
    long n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (y(i) == 1.0) ++n_pos;
    const long n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw MetricError("auc: both classes must be present");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return scores(a) < scores(b);
    });

    // Average ranks within tie groups; sums of half-integer ranks are exact
    // in double, so this matches brute-force pair counting bit for bit.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               scores(order[j + 1]) == scores(order[i]))
            ++j;
        // 1-based ranks i+1 .. j+1 share the average.
        const double avg_rank = static_cast<double>(i + 1 + j + 1) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            if (y(order[k]) == 1.0) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double n_pos_d = static_cast<double>(n_pos);
    return (rank_sum_pos - n_pos_d * (n_pos_d + 1.0) / 2.0) /
           (n_pos_d * static_cast<double>(n_neg));
}

}  // namespace rffnet
