#pragma once

#include <stdexcept>
#include <string>

namespace sl2ode {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violated argument contract: bad index, malformed configuration, unusable grid.
/// The command line maps this to exit code 2.
struct UsageError : Error {
    using Error::Error;
};

/// State or group element outside the domain of the requested operation
/// (excluded set of a system, out-of-chart decomposition, ...).  Exit code 4.
struct DomainError : Error {
    using Error::Error;
};

/// Out-of-chart group action or coordinate chart; carries the offending
/// quantity (a vanishing denominator, a non-positive conformal factor, ...).
struct ChartError : DomainError {
    double witness;
    ChartError(const std::string& what, double witness_value)
        : DomainError(what), witness(witness_value) {}
};

/// Geometrically degenerate input: coincident solutions, vanishing Wronskian,
/// rank-deficient fit, non-positive determinant where +1 is required.
struct DegenerateInputError : DomainError {
    using DomainError::DomainError;
};

} // namespace sl2ode
