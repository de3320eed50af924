#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marginlab {

// Base of every error the library throws on a violated precondition or a
// failed numeric routine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Zero-norm vectors fed to angle-based kernels, zero-norm parameters fed to
// normalized margins.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InfeasibleMarginError : public Error {
public:
    using Error::Error;
};

// Non-finite loss during an iterative fit; carries the offending step.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : Error("diverged at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

// Argument outside the region where a formula is valid.
class DomainError : public Error {
public:
    using Error::Error;
};

// Problem too large for an exhaustive routine.
class ScaleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace marginlab
