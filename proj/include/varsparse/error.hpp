#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varsparse {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text; carries the byte offset of the offending token.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside the domain of a function (log of non-positive, 0^negative, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative method did not converge within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A config file or command line is invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace varsparse
