#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmdf {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong inside bmdf" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector lengths disagree with each other or with LossSpec::m.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Inconsistent or missing configuration (missing psi, alpha <= 0, ...).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

// Both hypotheses assign zero density to an observation.
class DegenerateLikelihoodError : public Error {
public:
    using Error::Error;
};

// Problem too large for an exhaustive routine.
class RefusalError : public Error {
public:
    using Error::Error;
};

// Weight underflow or other floating point breakdown.
class NumericError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace bmdf
