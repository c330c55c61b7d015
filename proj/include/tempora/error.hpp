#pragma once

#include <stdexcept>
#include <string>

namespace tempora {

/// Base class for everything the engine throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text (S-expressions, dates, episode rows).
struct ParseError : Error {
    ParseError(const std::string& file, int line, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": " + message) {}
    explicit ParseError(const std::string& message) : Error(message) {}
};

/// Semantically invalid data: hierarchy cycles, arity mismatches,
/// unknown symbols, out-of-range parameters.
struct DataError : Error {
    using Error::Error;
};

/// Survival never crossed the threshold within the configured horizon.
struct UnboundedIntervalError : DataError {
    using DataError::DataError;
};

} // namespace tempora
