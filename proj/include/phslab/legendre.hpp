#pragma once

#include "phslab/system.hpp"

namespace phslab {

// ============================================================================
// Partial Legendre transform in the x1 block
//
//   H1*(e1, x2) = H(x1, x2) - e1^T x1,  with x1 solving dH/dx1(x1, x2) = e1.
//
// For convex-in-x1 Hamiltonians the transform satisfies
//   d H1*/d e1 = -x1   and   d H1*/d x2 = dH/dx2,
// and applying it twice recovers (x1, H). The solve is local: with multiple
// stationary points the branch nearest the supplied guess is returned.
// ============================================================================

struct LegendrePoint {
    Vec x1;              ///< solved primal block
    double value = 0.0;  ///< H1*(e1, x2)
    int iterations = 0;
    double residual = 0.0;  ///< ||dH/dx1 - e1||_inf at the solution
};

/// Damped Newton solve of dH/dx1(x1, x2) = e1 starting from x1_guess.
/// Convergence: residual < 1e-10 * (1 + ||e1||_inf) within 50 iterations,
/// step halved up to 30 times whenever the residual would grow. Throws
/// SolveDivergence (carrying the best iterate) on failure and NumericalError
/// when the x1-block Hessian is singular.
[[nodiscard]] LegendrePoint partial_legendre(const TwoPortPhs& sys, const Vec& e1, const Vec& x2,
                                             const Vec& x1_guess);

/// Finite-difference check of both first-order identities at (e1, x2).
/// Residuals are relative to the magnitude of the quantity checked.
struct LegendreIdentityReport {
    double co_state_residual = 0.0;  ///< |d H1*/d e1 + x1| / (1 + |x1|)
    double cross_residual = 0.0;     ///< |d H1*/d x2 - dH/dx2| / (1 + |dH/dx2|)
};

[[nodiscard]] LegendreIdentityReport verify_legendre_identities(const TwoPortPhs& sys, const Vec& e1,
                                                                const Vec& x2, const Vec& x1_guess);

/// Applies the transform twice starting from (x1, x2) and reports how well
/// the original co-state and energy are recovered. The second transform runs
/// on the dual function with its exact gradient -x1(e1, x2), so the check
/// exercises the transform itself rather than finite differencing.
struct InvolutionReport {
    double co_state_error = 0.0;  ///< ||e1_recovered - e1||_inf / (1 + ||e1||_inf)
    double value_error = 0.0;     ///< |H_recovered - H| / (1 + |H|)
};

[[nodiscard]] InvolutionReport legendre_involution_check(const TwoPortPhs& sys, const Vec& x1,
                                                         const Vec& x2);

}  // namespace phslab
