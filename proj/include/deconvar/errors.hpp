#pragma once

#include <stdexcept>
#include <string>

namespace deconvar {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration: bad parameter values, malformed plans, unusable
/// combinations of options.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A simulated trajectory left the numerically representable range.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// The requested transform or closed form is not available for the given
/// weight/function/error combination.
class UnsupportedCombination : public Error {
public:
    using Error::Error;
};

/// The data do not identify the parameters (near-singular normal system,
/// zero-variance series, vanishing denominator).
class DegenerateDesignError : public Error {
public:
    using Error::Error;
};

/// A numeric evaluation produced a non-finite intermediate value.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace deconvar
