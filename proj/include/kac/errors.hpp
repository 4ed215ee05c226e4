#pragma once

#include <stdexcept>
#include <string>

namespace kac {

// Base class for everything the library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid construction parameters (bad family parameters, malformed grids, ...).
struct ParameterError : Error {
    using Error::Error;
};

// Config file problems; carries the offending key and line when known.
struct ConfigError : Error {
    std::string key;
    int line = 0;
    ConfigError(const std::string& msg, std::string key_ = "", int line_ = 0)
        : Error(msg), key(std::move(key_)), line(line_) {}
};

// Two grid functions that were expected to live on the same grid do not.
struct GridMismatchError : Error {
    using Error::Error;
};

// Operation not available for this datum (no density, no sampler, infinite moment).
struct UnsupportedError : Error {
    using Error::Error;
};

// A numerical-quality gate failed: audits, truncation checks, normalization.
// Carries the offending quantity and the tolerance it violated.
struct NumericalError : Error {
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;
    NumericalError(const std::string& msg, std::string quantity_, double value_, double tolerance_)
        : Error(msg + " [" + quantity_ + " = " + std::to_string(value_) +
                ", tolerance = " + std::to_string(tolerance_) + "]"),
          quantity(std::move(quantity_)), value(value_), tolerance(tolerance_) {}
};

// A configured resource cap would be exceeded (e.g. Wild expansion depth).
struct ResourceLimitError : Error {
    using Error::Error;
};

}  // namespace kac
