#include "phslab/integrate.hpp"

#include <cmath>

namespace phslab {

// ----------------------------------------------------------------------------
// Input laws
// ----------------------------------------------------------------------------

InputLaw InputLaw::zero(int m) {
    return {[m](double, const Vec&) { return Vec::Zero(m); }};
}

InputLaw InputLaw::constant(Vec u) {
    return {[u = std::move(u)](double, const Vec&) { return u; }};
}

InputLaw InputLaw::open_loop(std::function<Vec(double)> u) {
    return {[u = std::move(u)](double t, const Vec&) { return u(t); }};
}

InputLaw InputLaw::feedback(std::function<Vec(double, const Vec&)> u) { return {std::move(u)}; }

// ----------------------------------------------------------------------------
// Trajectory
// ----------------------------------------------------------------------------

std::string Trajectory::phase_at(std::size_t i) const {
    std::string label;
    for (const PhaseMark& m : marks) {
        if (m.index > i) break;
        label = m.label;
    }
    return label;
}

double closure_tolerance(const Vec& x0) {
    return 1e-6 * (1.0 + x0.cwiseAbs().maxCoeff());
}

bool is_cyclic(const Trajectory& traj, double eps) {
    if (traj.states.size() < 2) return false;
    if (eps < 0.0) eps = closure_tolerance(traj.states.front());
    return (traj.states.back() - traj.states.front()).cwiseAbs().maxCoeff() <= eps;
}

// ----------------------------------------------------------------------------
// Fixed-step classical Runge-Kutta
// ----------------------------------------------------------------------------

namespace {

Vec input_at(const InputLaw& law, double t, const Vec& x, int m) {
    Vec u = law.eval(t, x);
    if (u.size() != m)
        throw std::invalid_argument("simulate: input law returned size " +
                                    std::to_string(u.size()) + ", expected " + std::to_string(m));
    if (!all_finite(u))
        throw NumericalError("simulate: input law returned non-finite values at t = " +
                             std::to_string(t));
    return u;
}

void guard_state(const Vec& x, double t, double limit) {
    if (!all_finite(x))
        throw NumericalError("simulate: state became non-finite at t = " + std::to_string(t));
    if (x.cwiseAbs().maxCoeff() > limit)
        throw NumericalError("simulate: state blow-up (|x| > " + std::to_string(limit) +
                             ") at t = " + std::to_string(t));
}

}  // namespace

Trajectory simulate(const PhsSystem& sys, const Vec& x0, const InputLaw& law,
                    const SimulateOptions& opt) {
    if (!(opt.step > 0.0)) throw std::invalid_argument("simulate: step must be > 0");
    if (!(opt.t_end > opt.t0)) throw std::invalid_argument("simulate: t_end must exceed t0");
    if (x0.size() != sys.n) throw std::invalid_argument("simulate: x0 size mismatch");

    const double h = opt.step;
    const auto steps = static_cast<std::size_t>(std::llround((opt.t_end - opt.t0) / h));
    if (steps == 0) throw std::invalid_argument("simulate: horizon shorter than one step");

    Trajectory traj;
    traj.step = h;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.inputs.reserve(steps + 1);
    traj.outputs.reserve(steps + 1);
    traj.energies.reserve(steps + 1);

    auto record = [&](double t, const Vec& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.inputs.push_back(input_at(law, t, x, sys.m));
        traj.outputs.push_back(sys.output(x));
        traj.energies.push_back(sys.hamiltonian(x));
    };

    Vec x = x0;
    guard_state(x, opt.t0, opt.blow_up_limit);
    record(opt.t0, x);

    auto f = [&](double t, const Vec& xs) { return sys.dynamics(xs, input_at(law, t, xs, sys.m)); };

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = opt.t0 + static_cast<double>(i) * h;
        const Vec k1 = f(t, x);
        const Vec k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
        const Vec k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
        const Vec k4 = f(t + h, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_next = opt.t0 + static_cast<double>(i + 1) * h;
        guard_state(x, t_next, opt.blow_up_limit);
        record(t_next, x);
    }
    return traj;
}

// ----------------------------------------------------------------------------
// Energy accounting
// ----------------------------------------------------------------------------

namespace {

std::vector<double> cumulative_trapezoid(const Trajectory& traj,
                                         const std::function<double(std::size_t)>& f) {
    std::vector<double> acc(traj.size(), 0.0);
    if (traj.size() < 2) return acc;
    double prev = f(0);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double cur = f(i);
        acc[i] = acc[i - 1] + 0.5 * traj.step * (prev + cur);
        prev = cur;
    }
    return acc;
}

}  // namespace

std::vector<double> supplied_energy(const Trajectory& traj, const std::vector<int>& coords) {
    for (int c : coords) {
        if (c < 0 || (!traj.inputs.empty() && c >= traj.inputs.front().size()))
            throw std::invalid_argument("supplied_energy: port coordinate out of range");
    }
    return cumulative_trapezoid(traj, [&](std::size_t i) {
        double p = 0.0;
        for (int c : coords) p += traj.outputs[i][c] * traj.inputs[i][c];
        return p;
    });
}

double EnergyLedger::supplied_total() const {
    double s = 0.0;
    for (const auto& series : port_supplied) s += series.back();
    return s;
}

EnergyLedger energy_balance(const PhsSystem& sys, const Trajectory& traj) {
    if (traj.size() < 2) throw std::invalid_argument("energy_balance: trajectory too short");
    EnergyLedger ledger;
    for (int g = 0; g < sys.port_group_count(); ++g)
        ledger.port_supplied.push_back(supplied_energy(traj, sys.port_group(g)));
    ledger.dissipated =
        cumulative_trapezoid(traj, [&](std::size_t i) { return sys.dissipated_power(traj.states[i]); });
    ledger.balance_residual = traj.energies.back() - traj.energies.front() -
                              ledger.supplied_total() + ledger.dissipated.back();
    return ledger;
}

}  // namespace phslab
