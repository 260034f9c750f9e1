#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tripchain {

/// Base class for data and validation failures (CLI exit code 1).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed input row. `row()` is 1-based and counts the header line.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& reason)
        : Error("row " + std::to_string(row) + ": " + reason), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tripchain
