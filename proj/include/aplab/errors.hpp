#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aplab {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user-supplied parameter (exponent out of range, bad option value, ...).
struct ParameterError : Error { using Error::Error; };

/// A call contract was violated (non-symmetric matrix, negative u, ...).
struct ContractError : Error { using Error::Error; };

/// Requested geometry is not covered by the grid / field.
struct DomainError : Error { using Error::Error; };

/// A finite-difference stencil leaves the grid.
struct StencilError : Error { using Error::Error; };

/// Diagnostic input carries no usable signal (e.g. all ball sups vanish).
struct DegenerateDataError : Error { using Error::Error; };

/// Solver did not reach the requested tolerance within the sweep budget.
struct ConvergenceError : Error {
    std::vector<double> residual_history;
    ConvergenceError(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
};

/// Residuals grew over many consecutive iterations.
struct DivergenceError : Error { using Error::Error; };

/// The 1D shooting oracle failed to bracket or refine its target.
struct OracleError : Error { using Error::Error; };

/// Scenario configuration problems.
struct ConfigError : Error { using Error::Error; };

/// Suite manifest problems.
struct ManifestError : Error { using Error::Error; };

/// Filesystem / serialization failure.
struct IoError : Error { using Error::Error; };

} // namespace aplab
