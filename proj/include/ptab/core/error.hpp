#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptab {

/// Problems with the data itself (malformed files, missing arms, zero variance).
/// Library preconditions on arguments use std::invalid_argument instead.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV content; `line()` is 1-based and counts the header.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed rows that violate the panel layout (missing step, duplicates, ordering).
class SchemaError : public DataError {
public:
    using DataError::DataError;
};

/// A treatment arm has no observations where a fit needs one.
class MissingArmError : public DataError {
public:
    using DataError::DataError;
};

/// All pseudo-outcomes are identical, so the sample SD is zero.
class DegenerateSampleError : public DataError {
public:
    using DataError::DataError;
};

/// Internal numeric failure (non-finite result where one is impossible in exact arithmetic).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ptab
