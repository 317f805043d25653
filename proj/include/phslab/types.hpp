#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace phslab {

/// Dense column vector, double precision. All state, co-state, port and
/// input quantities in this library are Vec; sizes stay small (n <= 16).
using Vec = Eigen::VectorXd;

/// Dense matrix, double precision, used for structure/input/Hessian blocks.
using Mat = Eigen::MatrixXd;

/// Raised when a numeric computation cannot continue: solver divergence,
/// state blow-up, singular Hessian, non-finite values.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by Newton-type solvers on non-convergence; carries the best
/// iterate seen so callers can inspect or restart from it.
class SolveDivergence : public NumericalError {
public:
    SolveDivergence(const std::string& what, Vec best_iterate, double best_residual)
        : NumericalError(what), best(std::move(best_iterate)), residual(best_residual) {}

    Vec best;         ///< iterate with the smallest residual norm seen
    double residual;  ///< infinity norm of the residual at `best`
};

/// Raised when user-facing configuration (files, flags, parameter structs)
/// is malformed or inconsistent.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phslab
