#pragma once

// Shared aliases, error types and formatting helpers used across the library.

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace elmvis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

// Invalid sizes, mismatched shapes, out-of-range indices.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values where finite math is required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file content; the message carries the row/column position.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally valid input that violates a data precondition (e.g. a zero row).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation requested in a state that cannot serve it (e.g. exhausted pool).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Request exceeds a hard implementation limit.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed 17-significant-digit formatting; round-trips any finite double and
// keeps every serialized artifact byte-reproducible.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace elmvis
