#pragma once

#include "phslab/constraints.hpp"
#include "phslab/integrate.hpp"
#include "phslab/models.hpp"

#include <array>
#include <string>

namespace phslab {

// ============================================================================
// Generalized four-phase cycles
//
// Alternating isothermal / adiabatic phases between two port-1 co-state
// levels e1_hot and e1_cold. Port 1 runs the exact constraint feedback; port
// 2 tracks a smooth reference for one shape coordinate of x2 with
// feedforward plus a critically damped PD loop, so tracking is exact in
// continuous time when the initial state lies on the reference.
//
// For lossless models the net extracted work -closed-int y2^T u2 dt matches
// e1_hot * dx1_hot + e1_cold * dx1_cold, and the measured efficiency
// approaches 1 - e1_cold / e1_hot.
//
// The synthesized port-1 input stands in for physically connecting and
// disconnecting a source between phases; no switching hardware is modeled.
// ============================================================================

/// One schedule phase: a reference move for the shape coordinate plus the
/// port-1 regime to hold while it runs.
struct CyclePhase {
    std::string label;
    bool isothermal = false;  ///< false: adiabatic (x1 held), true: e1 held
    SmoothMove shape_ref;     ///< reference for x2[shape_index] on [t0, t0+tau]
    double duration = 0.0;
};

struct CarnotSchedule {
    double e1_hot = 0.0;   ///< port-1 co-state level on the hot isothermal
    double e1_cold = 0.0;  ///< port-1 co-state level on the cold isothermal
    std::array<CyclePhase, 4> phases;

    Vec x0;  ///< stacked initial state; must sit on the first reference

    int shape_index = 0;     ///< tracked coordinate of x2
    int momentum_index = 1;  ///< conjugate momentum coordinate of x2
    double shape_rate = 1.0; ///< d(shape)/dt = shape_rate * momentum / mass
    double mass = 1.0;       ///< inertia of the momentum coordinate

    double tracking_omega = 100.0;  ///< PD bandwidth (rad/s); damping critical
    double step = 1e-4;             ///< integrator step; durations must be multiples

    double landing_rel_tol = 1e-3;   ///< adiabats must land on e1 targets within this
    double tracking_abs_tol = 1e-6;  ///< max allowed |shape - reference|, relative to span

    [[nodiscard]] double total_duration() const;
    void validate() const;
};

/// Ideal efficiency 1 - e1_cold / e1_hot of a cycle between two co-state
/// levels; requires e1_hot != 0.
[[nodiscard]] double efficiency_ideal(double e1_hot, double e1_cold);

struct CycleReport {
    double work_out = 0.0;    ///< -int y2^T u2 over the cycle
    double heat_hot = 0.0;    ///< port-1 supply over the hot isothermal
    double heat_cold = 0.0;   ///< port-1 supply over the cold isothermal
    double delta_x1_hot = 0.0;
    double delta_x1_cold = 0.0;
    double efficiency_measured = 0.0;  ///< work_out / heat_hot (0 when heat_hot == 0)
    double efficiency_ideal = 0.0;
    double closure_error = 0.0;       ///< ||x(end) - x(0)||_inf
    double inequality_slack = 0.0;    ///< e1_hot dx1_hot + e1_cold dx1_cold - work_out
    double max_tracking_error = 0.0;  ///< worst |shape - reference| seen
    double stirling_residual = 0.0;   ///< |work_out - heat_hot - heat_cold|
};

struct CycleRun {
    CycleReport report;
    Trajectory trajectory;
    EnergyLedger ledger;
};

/// Runs the four phases on a two-port system with n1 = 1. Throws
/// NumericalError when tracking diverges or an adiabatic phase fails to land
/// on its co-state target (schedule infeasible for the model); ConfigError
/// when durations do not align with the step grid.
[[nodiscard]] CycleRun run_cycle(const TwoPortPhs& sys, const CarnotSchedule& schedule);

/// Residual of the cycle identity: extracted work equals the summed
/// isothermal port-1 supplies.
[[nodiscard]] double stirling_identity_residual(const CycleReport& report);

// ============================================================================
// Schedule builders for the built-in models. Adiabatic endpoints come from
// each model's closed-form invariant, so cycles close by construction.
// ============================================================================

/// Gas piston between temperatures t_hot > t_cold; the hot isothermal
/// expands the chamber from v_start to v_expand.
[[nodiscard]] CarnotSchedule gas_piston_cycle(const GasPistonParams& p, double t_hot, double t_cold,
                                              double v_start, double v_expand,
                                              const std::array<double, 4>& durations, double omega,
                                              double step);

/// Actuator between coil currents i_high > i_low; the first isothermal pulls
/// the armature from q_start to q_pull (flux rises at constant current).
[[nodiscard]] CarnotSchedule actuator_cycle(const ActuatorParams& p, double i_high, double i_low,
                                            double q_start, double q_pull,
                                            const std::array<double, 4>& durations, double omega,
                                            double step);

}  // namespace phslab
