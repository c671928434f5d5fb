#include "rffnet/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rffnet/errors.hpp"

namespace rffnet {

namespace {

constexpr char kMagic[6] = {'R', 'F', 'F', 'N', 'E', 'T'};

void check_finite(const Matrix& X) {
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        if (!X.row(i).allFinite())
            throw DataError("fit: non-finite feature value at row " +
                            std::to_string(i + 1));
}

// --- little-endian primitives -------------------------------------------

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_u8(std::ostream& out, std::uint8_t v) {
    out.put(static_cast<char>(v));
}

void put_string(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_vector(std::ostream& out, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

std::uint64_t get_u64(std::istream& in, const char* what) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in)
        throw SerializationError(std::string("model file truncated while "
                                             "reading ") +
                                 what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in, const char* what) {
    return std::bit_cast<double>(get_u64(in, what));
}

std::uint8_t get_u8(std::istream& in, const char* what) {
    const int c = in.get();
    if (c == EOF)
        throw SerializationError(std::string("model file truncated while "
                                             "reading ") +
                                 what);
    return static_cast<std::uint8_t>(c);
}

std::string get_string(std::istream& in, const char* what) {
    const std::uint64_t len = get_u64(in, what);
    if (len > (1u << 20))
        throw SerializationError(std::string("implausible string length for ") +
                                 what);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in)
        throw SerializationError(std::string("model file truncated while "
                                             "reading ") +
                                 what);
    return s;
}

Vector get_vector(std::istream& in, Eigen::Index size, const char* what) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = get_f64(in, what);
    return v;
}

}  // namespace

FitReport fit(const Matrix& X, const Vector& y, const TrainConfig& config,
              LossKind loss,
              const std::optional<std::pair<Vector, Vector>>& init) {
    config.validate();
    if (X.rows() != y.size())
        throw ArgumentError("fit: X has " + std::to_string(X.rows()) +
                            " rows but y has " + std::to_string(y.size()));
    if (X.rows() < 2) throw ArgumentError("fit: need at least 2 samples");
    if (X.cols() < 1) throw ArgumentError("fit: need at least 1 feature");
    check_finite(X);
    validate_targets(loss, y);

    // Same seeded partition the training loop will draw; statistics must
    // come from the training rows only.
    const SplitIndices idx =
        split_train_val_indices(X.rows(), config.val_fraction, config.seed);

    StandardizationStats stats;
    if (idx.train.size() >= 2) {
        Matrix X_train(static_cast<Eigen::Index>(idx.train.size()), X.cols());
        for (std::size_t i = 0; i < idx.train.size(); ++i)
            X_train.row(static_cast<Eigen::Index>(i)) = X.row(idx.train[i]);
        stats = standardize_fit(X_train);
    } else {
        // Single training row: every column is constant.
        stats.mean = X.row(idx.train.front()).transpose();
        stats.std = Vector::Ones(X.cols());
    }

    FitResult result =
        fit_loop(standardize_apply(X, stats), y, config, loss, init);

    FitReport report;
    report.model.ff = std::move(result.ff);
    report.model.beta = std::move(result.beta);
    report.model.lambda = std::move(result.lambda);
    report.model.loss = loss;
    report.model.stats = std::move(stats);
    report.model.config = config;
    report.history = std::move(result.history);
    report.best_epoch = result.best_epoch;
    report.best_val_loss = result.best_val_loss;
    report.n_train = result.n_train;
    report.n_val = result.n_val;
    return report;
}

double predict_one(const ModelState& model, const Vector& x) {
    if (x.size() != model.p())
        throw ArgumentError("predict: input has dimension " +
                            std::to_string(x.size()) + ", model expects " +
                            std::to_string(model.p()));
    const Vector standardized =
        (x - model.stats.mean).cwiseQuotient(model.stats.std);
    return rff_map(model.lambda.cwiseProduct(standardized), model.ff)
        .dot(model.beta);
}

Vector predict(const ModelState& model, const Matrix& X) {
    if (X.cols() != model.p())
        throw ArgumentError("predict: inputs have dimension " +
                            std::to_string(X.cols()) + ", model expects " +
                            std::to_string(model.p()));
    // Row-at-a-time so batched and single-row evaluation agree bit-exactly.
    Vector scores(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        scores(i) = predict_one(model, X.row(i).transpose());
    return scores;
}

Vector predict_proba(const ModelState& model, const Matrix& X) {
    if (model.loss != LossKind::BinaryCrossEntropy)
        throw ArgumentError(
            "predict_proba: model was not trained with the cross-entropy "
            "loss");
    Vector proba = predict(model, X);
    for (Eigen::Index i = 0; i < proba.size(); ++i)
        proba(i) = sigmoid(proba(i));
    return proba;
}

Vector relevances(const ModelState& model) {
    const Vector abs = model.lambda.cwiseAbs();
    const double top = abs.maxCoeff();
    if (top == 0.0) return Vector::Zero(abs.size());
    return abs / top;
}

void save(const ModelState& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SerializationError(path.string() + ": cannot open for writing");

    out.write(kMagic, sizeof kMagic);
    put_u8(out, kModelFormatVersion);
    put_string(out, model.rng_id);
    put_u8(out, model.loss == LossKind::SquaredError ? 0 : 1);
    put_u64(out, static_cast<std::uint64_t>(model.p()));
    put_u64(out, static_cast<std::uint64_t>(model.s()));
    for (Eigen::Index i = 0; i < model.s(); ++i)
        for (Eigen::Index j = 0; j < model.p(); ++j)
            put_f64(out, model.ff.omega(i, j));
    put_vector(out, model.ff.phases);
    put_vector(out, model.beta);
    put_vector(out, model.lambda);
    put_vector(out, model.stats.mean);
    put_vector(out, model.stats.std);

    const TrainConfig& c = model.config;
    put_f64(out, c.eta);
    put_f64(out, c.mu);
    put_u64(out, static_cast<std::uint64_t>(c.patience));
    put_u64(out, static_cast<std::uint64_t>(c.max_epochs));
    put_u64(out, static_cast<std::uint64_t>(c.batch_size));
    put_f64(out, c.val_fraction);
    put_u64(out, c.seed);
    put_u64(out, std::bit_cast<std::uint64_t>(c.num_features));
    put_f64(out, c.rel_tol);

    if (!out) throw SerializationError(path.string() + ": write failed");
}

ModelState load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SerializationError(path.string() + ": cannot open");

    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw SerializationError(path.string() + ": not a model file");
    const std::uint8_t version = get_u8(in, "format version");
    if (version != kModelFormatVersion)
        throw SerializationError(
            path.string() + ": unsupported format version " +
            std::to_string(version) + " (expected " +
            std::to_string(kModelFormatVersion) + ")");

    ModelState model;
    model.rng_id = get_string(in, "rng id");
    const std::uint8_t loss_tag = get_u8(in, "loss tag");
    if (loss_tag > 1)
        throw SerializationError(path.string() + ": unknown loss tag " +
                                 std::to_string(loss_tag));
    model.loss = loss_tag == 0 ? LossKind::SquaredError
                               : LossKind::BinaryCrossEntropy;

    const auto p = static_cast<Eigen::Index>(get_u64(in, "p"));
    const auto s = static_cast<Eigen::Index>(get_u64(in, "s"));
    if (p < 1 || s < 1 || p > (1 << 24) || s > (1 << 24))
        throw SerializationError(path.string() +
                                 ": inconsistent dimensions (p " +
                                 std::to_string(p) + ", s " +
                                 std::to_string(s) + ")");
    model.ff.omega.resize(s, p);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            model.ff.omega(i, j) = get_f64(in, "omega");
    model.ff.phases = get_vector(in, s, "phases");
    model.beta = get_vector(in, s, "beta");
    model.lambda = get_vector(in, p, "lambda");
    model.stats.mean = get_vector(in, p, "mean");
    model.stats.std = get_vector(in, p, "std");

    TrainConfig& c = model.config;
    c.eta = get_f64(in, "eta");
    c.mu = get_f64(in, "mu");
    c.patience = static_cast<long>(get_u64(in, "patience"));
    c.max_epochs = static_cast<long>(get_u64(in, "max_epochs"));
    c.batch_size = static_cast<long>(get_u64(in, "batch_size"));
    c.val_fraction = get_f64(in, "val_fraction");
    c.seed = get_u64(in, "seed");
    c.num_features =
        std::bit_cast<std::int64_t>(get_u64(in, "num_features"));
    c.rel_tol = get_f64(in, "rel_tol");

    for (Eigen::Index j = 0; j < p; ++j)
        if (!(model.stats.std(j) > 0.0) || !std::isfinite(model.stats.std(j)))
            throw SerializationError(path.string() +
                                     ": invalid standardization scale");
    if (!model.beta.allFinite() || !model.lambda.allFinite())
        throw SerializationError(path.string() + ": non-finite parameters");
    return model;
}

}  // namespace rffnet
