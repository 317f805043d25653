#pragma once

#include "phslab/system.hpp"

#include <functional>
#include <string>
#include <vector>

namespace phslab {

// ============================================================================
// Input laws
// ============================================================================

/// Port input as a function of time and current state. Open-loop signals
/// ignore the state argument. The integrator evaluates the law at every
/// Runge-Kutta stage with the stage time and stage state.
struct InputLaw {
    std::function<Vec(double, const Vec&)> eval;

    [[nodiscard]] static InputLaw zero(int m);
    [[nodiscard]] static InputLaw constant(Vec u);
    [[nodiscard]] static InputLaw open_loop(std::function<Vec(double)> u);
    [[nodiscard]] static InputLaw feedback(std::function<Vec(double, const Vec&)> u);
};

// ============================================================================
// Trajectories
// ============================================================================

/// Label attached to a grid index, marking the start of a schedule phase.
struct PhaseMark {
    std::size_t index = 0;
    std::string label;
};

/// Sampled solution on the uniform grid t_i = t0 + i h. Outputs and energies
/// are evaluated from the stored states, so outputs[i] == sys.output(states[i]).
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> inputs;   ///< law evaluated at (t_i, x_i)
    std::vector<Vec> outputs;
    std::vector<double> energies;  ///< H(x_i)
    std::vector<PhaseMark> marks;
    double step = 0.0;

    [[nodiscard]] std::size_t size() const { return times.size(); }

    /// Phase label active at sample i ("" before the first mark).
    [[nodiscard]] std::string phase_at(std::size_t i) const;
};

struct SimulateOptions {
    double t0 = 0.0;
    double t_end = 1.0;
    double step = 1e-3;
    /// Infinity-norm bound; exceeding it aborts with the blow-up time.
    double blow_up_limit = 1e12;
};

/// Classical fixed-step fourth-order Runge-Kutta. Deterministic: identical
/// inputs produce bitwise-identical trajectories. Throws NumericalError on
/// blow-up or non-finite values, reporting the time reached.
[[nodiscard]] Trajectory simulate(const PhsSystem& sys, const Vec& x0, const InputLaw& law,
                                  const SimulateOptions& opt);

/// Closure test ||x(end) - x(0)||_inf <= eps; eps < 0 selects the default
/// 1e-6 * (1 + ||x(0)||_inf).
[[nodiscard]] bool is_cyclic(const Trajectory& traj, double eps = -1.0);

/// The default closure tolerance for a trajectory starting at x0.
[[nodiscard]] double closure_tolerance(const Vec& x0);

// ============================================================================
// Energy accounting
// ============================================================================

/// Cumulative trapezoid integral of sum_{i in coords} y_i u_i along the
/// trajectory; coords index the port vector. Returns size() values, first 0.
[[nodiscard]] std::vector<double> supplied_energy(const Trajectory& traj,
                                                  const std::vector<int>& coords);

/// Per-port-group energy bookkeeping over one trajectory.
struct EnergyLedger {
    /// One cumulative supplied-energy series per port group of the system.
    std::vector<std::vector<double>> port_supplied;
    /// Cumulative trapezoid integral of e^T R(x, e).
    std::vector<double> dissipated;
    /// H(end) - H(0) - supplied_total + dissipated; near zero when the
    /// integration resolved the dynamics.
    double balance_residual = 0.0;

    [[nodiscard]] double supplied_total() const;
    [[nodiscard]] double port_total(std::size_t g) const { return port_supplied[g].back(); }
};

[[nodiscard]] EnergyLedger energy_balance(const PhsSystem& sys, const Trajectory& traj);

}  // namespace phslab
