#pragma once

#include "phslab/integrate.hpp"
#include "phslab/models.hpp"
#include "phslab/system.hpp"

namespace phslab {

// ============================================================================
// Energy router
//
// Skew output feedback between two lossless systems:
//
//   u1 = -y1 (y2^T y2) + v1,      u2 = +y2 (y1^T y1) + v2
//
// The interconnection is power-neutral, and with v = 0 the donor loses
// energy at rate |y1|^2 |y2|^2 while the receiver gains exactly that rate:
// dH1/dt = -|y1|^2 |y2|^2 + y1^T v1, dH2/dt = +|y1|^2 |y2|^2 + y2^T v2.
// When y2 = 0 the coupling is inactive (dead state); scenarios restart it
// with a short impulse on v2.
// ============================================================================

struct RouterInputs {
    Vec u1, u2;
};

[[nodiscard]] RouterInputs router_feedback(const Vec& y1, const Vec& y2, const Vec& v1,
                                           const Vec& v2);

struct RouterCoupling {
    PhsSystem donor;     ///< loses energy under the coupling (v = 0)
    PhsSystem receiver;  ///< gains energy under the coupling (v = 0)
};

/// Closes the router loop into one system with inputs (v1, v2) and
/// H = H_donor + H_receiver. The coupling moves into the (skew) structure
/// matrix, so the composite is again lossless. Both components must be
/// lossless; this is audited on the given sample states and violations
/// raise std::invalid_argument.
[[nodiscard]] PhsSystem compose_router(const RouterCoupling& coupling,
                                       const std::vector<Vec>& donor_samples,
                                       const std::vector<Vec>& receiver_samples);

/// Energy split of a composed-router state.
struct RouterEnergies {
    double donor = 0.0;
    double receiver = 0.0;
};

[[nodiscard]] RouterEnergies router_energies(const RouterCoupling& coupling, const Vec& x);

// ============================================================================
// Energy-shaping feedback for the actuator
//
// Port-1 feedback u1 = beta(x) + v1 that doubles the magnetic energy term:
// the closed loop is again port-Hamiltonian with
//
//   H_d = phi^2 / L(q) + p^2 / (2 m),
//   J_d = [[0, 0, alpha], [0, 0, 1], [-alpha, -1, 0]],
//   alpha(phi, q) = (1/4) (L'(q) / L(q)) phi,   beta = alpha p / m.
//
// The same J_d with the *unshaped* Hamiltonian is realized exactly by the
// direct output feedback u = [[0, alpha], [-alpha, 0]] y + v; the two closed
// loops coincide on the phi = 0 slice and differ elsewhere.
// ============================================================================

struct EnergyShapingDesign {
    ActuatorParams params;

    [[nodiscard]] double alpha(double phi, double q) const;
    [[nodiscard]] double beta(double phi, double q, double p) const;
    [[nodiscard]] double shaped_hamiltonian(const Vec& x) const;  ///< H_d
    [[nodiscard]] double added_hamiltonian(const Vec& x) const;   ///< H_d - H
    [[nodiscard]] Mat desired_structure(double phi, double q) const;  ///< J_d
};

[[nodiscard]] EnergyShapingDesign actuator_energy_shaping(const ActuatorParams& p);

/// Residuals of the design equations on sample states (stacked (phi, q, p)).
struct MatchingReport {
    /// Worst row of the structure-matching equations, relative to 1 + |dH/dx|.
    double max_matching_residual = 0.0;
    /// Worst |f_closed(x) - J_d dH_d/dx| with u1 = beta(x), u2 = 0.
    double max_closed_loop_defect = 0.0;
    /// Worst |f_direct(x, v) - (J_d dH/dx + G v)| for the direct output
    /// feedback with the unshaped Hamiltonian.
    double max_direct_feedback_defect = 0.0;
    int samples = 0;
};

[[nodiscard]] MatchingReport matching_residual(const EnergyShapingDesign& design,
                                               const std::vector<Vec>& states);

/// Shaped closed loop as a system in its own right (inputs (v1, v2)).
[[nodiscard]] PhsSystem energy_shaping_closed_loop(const EnergyShapingDesign& design);

/// Feedback law u = (beta(x) + v1(t, x), v2(t, x)) for the open actuator.
[[nodiscard]] InputLaw energy_shaping_law(const EnergyShapingDesign& design, InputLaw v);

}  // namespace phslab
