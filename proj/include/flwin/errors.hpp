#pragma once

#include <stdexcept>
#include <string>

namespace flwin {

/// Argument outside the domain an operation is defined on (distance out of
/// range, negative rate, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A documented precondition on parameters does not hold (step size too large,
/// zeta outside (0, gamma/L), ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical routine failed to reach its tolerance (quadrature, bisection,
/// truncated sums, divergence of an iterative method).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved = 0.0)
        : std::runtime_error(what), achieved_(achieved) {}

    /// Achieved error / remaining mass at the point of failure.
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Config document or sweep names a field that does not exist.
class UnknownParameterError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace flwin
