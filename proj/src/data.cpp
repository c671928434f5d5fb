#include "rffnet/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rffnet/errors.hpp"

namespace rffnet {

namespace {

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line, long row,
                                      const std::string& where) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted)
        throw DataError(where + ": row " + std::to_string(row) +
                        ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

double parse_cell(const std::string& cell, long row, const std::string& col,
                  const std::string& where) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw DataError(where + ": row " + std::to_string(row) + ", column '" +
                        col + "': not numeric: '" + cell + "'");
    if (!std::isfinite(value))
        throw DataError(where + ": row " + std::to_string(row) + ", column '" +
                        col + "': non-finite value '" + cell + "'");
    return value;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& idx) {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), data.p());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(idx[i]);
        out.y(static_cast<Eigen::Index>(i)) = data.y(idx[i]);
    }
    out.feature_names = data.feature_names;
    out.task = data.task;
    return out;
}

std::vector<std::string> indexed_names(const char* prefix, Eigen::Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        names.push_back(prefix + std::to_string(j + 1));
    return names;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path,
                 const TargetColumn& target, TaskKind task) {
    const std::string where = path.string();
    std::ifstream in(path);
    if (!in) throw DataError(where + ": cannot open file");

    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw DataError(where + ": missing header row");

    const std::vector<std::string> header = split_record(lines[0], 0, where);
    const auto n_cols = static_cast<Eigen::Index>(header.size());

    Eigen::Index target_col = -1;
    if (std::holds_alternative<std::string>(target)) {
        const std::string& name = std::get<std::string>(target);
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DataError(where + ": target column '" + name +
                            "' not found in header");
        target_col = static_cast<Eigen::Index>(it - header.begin());
    } else {
        target_col = std::get<Eigen::Index>(target);
        if (target_col < 0 || target_col >= n_cols)
            throw DataError(where + ": target column index " +
                            std::to_string(target_col) +
                            " out of range (file has " +
                            std::to_string(n_cols) + " columns)");
    }
    if (n_cols < 2)
        throw DataError(where + ": need at least one feature column besides "
                        "the target");

    const auto n_rows = static_cast<Eigen::Index>(lines.size()) - 1;
    if (n_rows < 1) throw DataError(where + ": no data rows");

    Dataset data;
    data.task = task;
    data.X.resize(n_rows, n_cols - 1);
    data.y.resize(n_rows);
    for (Eigen::Index j = 0; j < n_cols; ++j)
        if (j != target_col) data.feature_names.push_back(header[j]);

    for (Eigen::Index r = 0; r < n_rows; ++r) {
        const long row = r + 1;  // 1-based data row
        const std::vector<std::string> cells =
            split_record(lines[r + 1], row, where);
        if (static_cast<Eigen::Index>(cells.size()) != n_cols)
            throw DataError(where + ": row " + std::to_string(row) +
                            ": expected " + std::to_string(n_cols) +
                            " fields, got " + std::to_string(cells.size()));
        Eigen::Index feature = 0;
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            const double value = parse_cell(cells[j], row, header[j], where);
            if (j == target_col)
                data.y(r) = value;
            else
                data.X(r, feature++) = value;
        }
        if (task == TaskKind::BinaryClassification && data.y(r) != 0.0 &&
            data.y(r) != 1.0)
            throw DataError(where + ": row " + std::to_string(row) +
                            ": classification target must be 0 or 1, got " +
                            cells[target_col]);
    }
    return data;
}

void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::string& target_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path.string() + ": cannot open for writing");

    const std::vector<std::string> names =
        data.feature_names.empty() ? indexed_names("x", data.p())
                                   : data.feature_names;
    for (const auto& name : names) out << name << ',';
    out << target_name << '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (Eigen::Index j = 0; j < data.p(); ++j)
            out << format_double(data.X(i, j)) << ',';
        out << format_double(data.y(i)) << '\n';
    }
    if (!out) throw DataError(path.string() + ": write failed");
}

StandardizationStats standardize_fit(const Matrix& X_train) {
    const Eigen::Index n = X_train.rows();
    if (n < 1) throw DataError("standardize_fit: empty training split");
    if (n < 2)
        throw DataError(
            "standardize_fit: sample standard deviation needs at least 2 "
            "rows, got 1");

    StandardizationStats stats;
    stats.mean = X_train.colwise().mean();
    stats.std.resize(X_train.cols());
    for (Eigen::Index j = 0; j < X_train.cols(); ++j) {
        const double lo = X_train.col(j).minCoeff();
        const double hi = X_train.col(j).maxCoeff();
        if (lo == hi) {
            // Constant column: center it away and leave the scale alone.
            stats.mean(j) = lo;
            stats.std(j) = 1.0;
            continue;
        }
        const double var =
            (X_train.col(j).array() - stats.mean(j)).square().sum() /
            static_cast<double>(n - 1);
        stats.std(j) = std::sqrt(var);
    }
    return stats;
}

Matrix standardize_apply(const Matrix& X, const StandardizationStats& stats) {
    if (X.cols() != stats.mean.size() || X.cols() != stats.std.size())
        throw ArgumentError("standardize_apply: X has " +
                            std::to_string(X.cols()) +
                            " columns, stats describe " +
                            std::to_string(stats.mean.size()));
    return (X.rowwise() - stats.mean.transpose()).array().rowwise() /
           stats.std.transpose().array();
}

double se1_response(const Vector& x) {
    if (x.size() != 18)
        throw ArgumentError("se1_response: expected 18 features, got " +
                            std::to_string(x.size()));
    const double a = x(0) + x(2);
    return std::sin(a * a) * std::sin(x(5) * x(6) * x(7));
}

double se2_response(const Vector& x) {
    if (x.size() != 100)
        throw ArgumentError("se2_response: expected 100 features, got " +
                            std::to_string(x.size()));
    const double s = x(10) + x(11) + x(12) + x(13) + x(14);
    return std::log(s * s);
}

Dataset gen_se1(Eigen::Index n, std::uint64_t seed, double noise_sigma) {
    if (n < 1) throw ArgumentError("gen_se1: n must be >= 1");
    if (noise_sigma < 0.0)
        throw ArgumentError("gen_se1: noise sigma must be >= 0");

    Dataset data;
    data.task = TaskKind::Regression;
    data.X.resize(n, 18);
    data.y.resize(n);
    data.feature_names = indexed_names("x", 18);
    Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < 18; ++j) data.X(i, j) = rng.normal();
        data.y(i) = se1_response(data.X.row(i).transpose()) +
                    noise_sigma * rng.normal();
    }
    return data;
}

Dataset gen_se2(Eigen::Index n, std::uint64_t seed, double noise_sigma) {
    if (n < 1) throw ArgumentError("gen_se2: n must be >= 1");
    if (noise_sigma < 0.0)
        throw ArgumentError("gen_se2: noise sigma must be >= 0");

    Dataset data;
    data.task = TaskKind::Regression;
    data.X.resize(n, 100);
    data.y.resize(n);
    data.feature_names = indexed_names("x", 100);
    Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        // The log blows up on an exactly-zero sum; resample that row.
        do {
            for (Eigen::Index j = 0; j < 100; ++j) data.X(i, j) = rng.normal();
        } while (data.X.row(i).segment(10, 5).sum() == 0.0);
        data.y(i) = se2_response(data.X.row(i).transpose()) +
                    noise_sigma * rng.normal();
    }
    return data;
}

ThreeWaySplit split_threeway(const Dataset& data, const ThreeWaySizes& sizes,
                             std::uint64_t seed) {
    if (sizes.n_train < 0 || sizes.n_val < 0 || sizes.n_test < 0)
        throw ArgumentError("split_threeway: sizes must be nonnegative");
    const Eigen::Index total = sizes.n_train + sizes.n_val + sizes.n_test;
    if (total > data.n())
        throw ArgumentError("split_threeway: requested " +
                            std::to_string(total) + " rows, dataset has " +
                            std::to_string(data.n()));

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(data.n()));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    shuffle(perm, rng);

    auto slice = [&](Eigen::Index offset, Eigen::Index count) {
        std::vector<Eigen::Index> idx(perm.begin() + offset,
                                      perm.begin() + offset + count);
        std::sort(idx.begin(), idx.end());
        return take_rows(data, idx);
    };
    return ThreeWaySplit{
        slice(0, sizes.n_train), slice(sizes.n_train, sizes.n_val),
        slice(sizes.n_train + sizes.n_val, sizes.n_test)};
}

}  // namespace rffnet
