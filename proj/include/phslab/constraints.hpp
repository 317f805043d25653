#pragma once

#include "phslab/integrate.hpp"
#include "phslab/system.hpp"

namespace phslab {

// ============================================================================
// Port-1 constraint enforcement
//
// Feedback inputs on port 1 that hold either the x1 block (adiabatic: no
// exchange through port 1's conjugate state) or the port-1 co-state e1
// (isothermal) constant along the flow. Both are exact in continuous time;
// only integration error perturbs the invariant.
// ============================================================================

/// u1 making dx1/dt = 0:  u1 = G1^-1 (R1 e1 - J1 e1).
[[nodiscard]] Vec adiabatic_input(const TwoPortPhs& sys, const Vec& x1, const Vec& x2);

/// u1 making de1/dt = 0 given the current x2 velocity:
///   dx1/dt = -(d2H/dx1^2)^-1 (d2H/dx1 dx2) dx2/dt,
///   u1 = G1^-1 (dx1/dt + R1 e1 - J1 e1).
/// Throws NumericalError when the x1-block Hessian is singular.
[[nodiscard]] Vec isothermal_input(const TwoPortPhs& sys, const Vec& x1, const Vec& x2,
                                   const Vec& x2_dot);

/// Port-2 input as a function of (t, stacked state); size m2.
using Port2Law = std::function<Vec(double, const Vec&)>;

/// Combined input law [u1; u2] with u1 the adiabatic feedback. u2 is
/// evaluated first; the x1 block never depends on it.
[[nodiscard]] InputLaw adiabatic_law(const TwoPortPhs& sys, Port2Law u2);

/// Combined input law [u1; u2] with u1 the isothermal feedback. u2 is
/// evaluated first because the x2 velocity entering u1 depends on it.
[[nodiscard]] InputLaw isothermal_law(const TwoPortPhs& sys, Port2Law u2);

// ============================================================================
// Cyclic-motion supply audit
//
// For cyclic trajectories on which the port-1 co-state stays constant, both
// port supplies must be non-negative: int y1^T u1 dt >= 0 and
// int y2^T u2 dt >= 0. Preconditions that fail make the audit inapplicable,
// never a failure.
// ============================================================================

struct CyclicSupplyAudit {
    bool applicable = false;
    std::string reason;  ///< why the audit does not apply (empty otherwise)

    double closure_error = 0.0;     ///< ||x(end) - x(0)||_inf
    double costate_variation = 0.0; ///< max_t ||y1(t) - y1(0)||_inf
    double port1_supplied = 0.0;
    double port2_supplied = 0.0;  ///< 0 for one-port systems
    double tolerance = 0.0;       ///< pass threshold: supplied >= -tolerance

    bool port1_ok = false;
    bool port2_ok = false;

    [[nodiscard]] bool ok() const { return applicable && port1_ok && port2_ok; }
};

/// y1_tolerance bounds the co-state variation relative to 1 + ||y1(0)||_inf.
/// closure_eps < 0 selects the default closure tolerance. The supply
/// threshold is 1e-6 times an energy scale formed from the integrals of
/// |y^T u| per port, so it tracks the size of the motion.
[[nodiscard]] CyclicSupplyAudit cyclic_supply_audit(const PhsSystem& sys, const Trajectory& traj,
                                                    double y1_tolerance,
                                                    double closure_eps = -1.0);

}  // namespace phslab
