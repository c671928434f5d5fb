#pragma once

#include <stdexcept>
#include <string>

namespace rffnet {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument values or inconsistent shapes.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Problems with input data: unparsable CSV cells, non-finite values,
// targets outside the admissible set for the task.
class DataError : public Error {
public:
    using Error::Error;
};

// Linear-algebra failures (singular systems, residual above tolerance).
class NumericError : public Error {
public:
    using Error::Error;
};

// Metric preconditions violated (e.g. AUC with a single class).
class MetricError : public Error {
public:
    using Error::Error;
};

// Model file problems: bad magic, unknown version, truncation,
// dimension inconsistencies.
class SerializationError : public Error {
public:
    using Error::Error;
};

// Raised by the training loop when a gradient overflows; carries the
// epoch and batch where it happened.
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, long epoch, long batch)
        : Error(what + " (epoch " + std::to_string(epoch) + ", batch " +
                std::to_string(batch) + ")"),
          epoch_(epoch),
          batch_(batch) {}

    long epoch() const { return epoch_; }
    long batch() const { return batch_; }

private:
    long epoch_;
    long batch_;
};

}  // namespace rffnet
