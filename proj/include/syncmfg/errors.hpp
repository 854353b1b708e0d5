#pragma once

#include <stdexcept>
#include <string>

namespace syncmfg {

// Base class for all solver-raised errors.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid model parameters (sigma2 <= 0, kappa <= 0, beta < 0, ...).
struct ParameterDomainError : SolverError {
    using SolverError::SolverError;
};

// Input outside the mathematical domain of an operation (|q| > 1, p outside [0,1], ...).
struct DomainError : SolverError {
    using SolverError::SolverError;
};

// Operation called with the wrong cost model (e.g. energy() with beta > 0).
struct ModelMismatchError : SolverError {
    using SolverError::SolverError;
};

// A stated precondition does not hold (non-stationary point, grid mismatch, ...).
struct PreconditionError : SolverError {
    using SolverError::SolverError;
};

// Numerical failure: step-size underflow, manifold escape, shooting failure.
// Carries the last state reached so callers can diagnose.
struct NumericalError : SolverError {
    NumericalError(const std::string& what, double t, double a, double q)
        : SolverError(what), last_t(t), last_a(a), last_q(q) {}
    explicit NumericalError(const std::string& what) : SolverError(what) {}
    double last_t = 0.0, last_a = 0.0, last_q = 0.0;
};

}  // namespace syncmfg
