#include "phslab/carnot.hpp"

#include <cmath>
#include <memory>

namespace phslab {

double CarnotSchedule::total_duration() const {
    double total = 0.0;
    for (const CyclePhase& ph : phases) total += ph.duration;
    return total;
}

void CarnotSchedule::validate() const {
    if (!(step > 0.0)) throw ConfigError("cycle: step must be > 0");
    if (!(mass > 0.0)) throw ConfigError("cycle: mass must be > 0");
    if (shape_rate == 0.0) throw ConfigError("cycle: shape_rate must be nonzero");
    if (!(tracking_omega > 0.0)) throw ConfigError("cycle: tracking_omega must be > 0");
    for (const CyclePhase& ph : phases) {
        if (!(ph.duration > 0.0)) throw ConfigError("cycle: phase durations must be > 0");
        const double steps = ph.duration / step;
        if (std::abs(std::round(steps) - steps) > 1e-9 * std::max(1.0, steps))
            throw ConfigError("cycle: phase duration " + std::to_string(ph.duration) +
                              " is not an integer multiple of step " + std::to_string(step));
    }
}

double efficiency_ideal(double e1_hot, double e1_cold) {
    if (e1_hot == 0.0) throw std::invalid_argument("efficiency_ideal: e1_hot must be nonzero");
    return 1.0 - e1_cold / e1_hot;
}

double stirling_identity_residual(const CycleReport& report) {
    return std::abs(report.work_out - report.heat_hot - report.heat_cold);
}

namespace {

struct PhaseWindows {
    std::array<std::size_t, 5> bounds{};  ///< grid indices of phase starts, plus the end
};

PhaseWindows phase_windows(const CarnotSchedule& sched) {
    PhaseWindows w;
    w.bounds[0] = 0;
    for (int k = 0; k < 4; ++k) {
        const auto steps = static_cast<std::size_t>(std::llround(sched.phases[k].duration / sched.step));
        w.bounds[k + 1] = w.bounds[k] + steps;
    }
    return w;
}

const CyclePhase& phase_at_time(const CarnotSchedule& sched, double t) {
    double t0 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double t1 = t0 + sched.phases[k].duration;
        if (t < t1 || k == 3) return sched.phases[k];
        t0 = t1;
    }
    return sched.phases[3];
}

}  // namespace

CycleRun run_cycle(const TwoPortPhs& sys, const CarnotSchedule& schedule) {
    sys.validate();
    schedule.validate();
    if (sys.n1 != 1)
        throw std::invalid_argument("run_cycle: schedules target systems with a scalar x1 block");
    if (sys.m2 != 1)
        throw std::invalid_argument("run_cycle: schedules target systems with a scalar port 2");
    if (schedule.shape_index < 0 || schedule.shape_index >= sys.n2 ||
        schedule.momentum_index < 0 || schedule.momentum_index >= sys.n2 ||
        schedule.shape_index == schedule.momentum_index)
        throw ConfigError("run_cycle: invalid shape/momentum coordinate indices");

    auto s = std::make_shared<const TwoPortPhs>(sys);
    const CarnotSchedule sched = schedule;
    const double kp = sched.mass * sched.tracking_omega * sched.tracking_omega / sched.shape_rate;
    const double kd = 2.0 * sched.tracking_omega;

    // Computed-force tracking for the shape coordinate: cancel the internal
    // force, inject the reference momentum rate, close a critically damped
    // PD loop on (shape, momentum) errors.
    auto tracking_u2 = [s, sched, kp, kd](double t, const Vec& x1, const Vec& x2) {
        const CyclePhase& ph = phase_at_time(sched, t);
        const double s_ref = ph.shape_ref.pos(t);
        const double pi_ref = sched.mass * ph.shape_ref.vel(t) / sched.shape_rate;
        const double pi_ref_dot = sched.mass * ph.shape_ref.acc(t) / sched.shape_rate;

        const Vec e2 = s->e2(x1, x2);
        const Vec internal = s->j2(x1, x2) * e2 - s->r2_or_zero(x1, x2) * e2;
        const double f_int = internal[sched.momentum_index];
        const double gain = s->g2(x1, x2)(sched.momentum_index, 0);
        if (std::abs(gain) < 1e-12)
            throw NumericalError("run_cycle: port 2 cannot actuate the momentum coordinate");

        const double e_s = s_ref - x2[sched.shape_index];
        const double e_pi = pi_ref - x2[sched.momentum_index];
        return Vec::Constant(1, (pi_ref_dot + kp * e_s + kd * e_pi - f_int) / gain);
    };

    InputLaw law = InputLaw::feedback([s, sched, tracking_u2](double t, const Vec& x) {
        auto [x1, x2] = s->split_state(x);
        const Vec u2 = tracking_u2(t, x1, x2);
        Vec u1;
        if (phase_at_time(sched, t).isothermal) {
            const Vec e2 = s->e2(x1, x2);
            const Vec x2_dot = s->j2(x1, x2) * e2 - s->r2_or_zero(x1, x2) * e2 + s->g2(x1, x2) * u2;
            u1 = isothermal_input(*s, x1, x2, x2_dot);
        } else {
            u1 = adiabatic_input(*s, x1, x2);
        }
        Vec u(s->m());
        u.head(s->n1) = u1;
        u.tail(s->m2) = u2;
        return u;
    });

    const PhsSystem embedded = embed_two_port(sys);
    SimulateOptions opt;
    opt.t0 = 0.0;
    opt.t_end = sched.total_duration();
    opt.step = sched.step;

    CycleRun run;
    run.trajectory = simulate(embedded, sched.x0, law, opt);

    const PhaseWindows windows = phase_windows(sched);
    for (int k = 0; k < 4; ++k)
        run.trajectory.marks.push_back({windows.bounds[k], sched.phases[k].label});

    run.ledger = energy_balance(embedded, run.trajectory);
    const std::vector<double>& port1 = run.ledger.port_supplied[0];

    // Tracking supervision: reference vs achieved shape coordinate.
    double span = 0.0;
    for (const CyclePhase& ph : sched.phases)
        span = std::max(span, std::abs(ph.shape_ref.to - ph.shape_ref.from));
    double worst_track = 0.0;
    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
        const double t = run.trajectory.times[i];
        const double ref = phase_at_time(sched, t).shape_ref.pos(t);
        const double got = run.trajectory.states[i][sys.n1 + sched.shape_index];
        worst_track = std::max(worst_track, std::abs(got - ref));
    }
    if (worst_track > sched.tracking_abs_tol * (1.0 + span))
        throw NumericalError("run_cycle: tracking diverged (max error " +
                             std::to_string(worst_track) + ")");

    // Adiabatic phases must land on the upcoming co-state target.
    auto e1_at = [&](std::size_t idx) {
        auto [x1, x2] = sys.split_state(run.trajectory.states[idx]);
        return sys.e1(x1, x2)[0];
    };
    const std::array<std::pair<std::size_t, double>, 2> landings = {
        std::pair{windows.bounds[2], sched.e1_cold}, std::pair{windows.bounds[4], sched.e1_hot}};
    for (const auto& [idx, target] : landings) {
        const double got = e1_at(idx);
        if (std::abs(got - target) > sched.landing_rel_tol * (1.0 + std::abs(target)))
            throw NumericalError("run_cycle: adiabatic phase landed at co-state " +
                                 std::to_string(got) + ", target " + std::to_string(target) +
                                 " (schedule infeasible for this model)");
    }

    CycleReport& rep = run.report;
    rep.work_out = -run.ledger.port_total(1);
    rep.heat_hot = port1[windows.bounds[1]] - port1[windows.bounds[0]];
    rep.heat_cold = port1[windows.bounds[3]] - port1[windows.bounds[2]];
    rep.delta_x1_hot = run.trajectory.states[windows.bounds[1]][0] -
                       run.trajectory.states[windows.bounds[0]][0];
    rep.delta_x1_cold = run.trajectory.states[windows.bounds[3]][0] -
                        run.trajectory.states[windows.bounds[2]][0];
    rep.efficiency_ideal = efficiency_ideal(sched.e1_hot, sched.e1_cold);
    rep.efficiency_measured = rep.heat_hot == 0.0 ? 0.0 : rep.work_out / rep.heat_hot;
    rep.closure_error =
        (run.trajectory.states.back() - run.trajectory.states.front()).cwiseAbs().maxCoeff();
    rep.inequality_slack =
        sched.e1_hot * rep.delta_x1_hot + sched.e1_cold * rep.delta_x1_cold - rep.work_out;
    rep.max_tracking_error = worst_track;
    rep.stirling_residual = stirling_identity_residual(rep);
    return run;
}

// ----------------------------------------------------------------------------
// Schedule builders
// ----------------------------------------------------------------------------

namespace {

std::array<CyclePhase, 4> four_moves(const std::array<double, 4>& durations,
                                     const std::array<double, 5>& shape_points) {
    const std::array<const char*, 4> labels = {"iso_hot", "adiabatic_1", "iso_cold", "adiabatic_2"};
    const std::array<bool, 4> iso = {true, false, true, false};
    std::array<CyclePhase, 4> phases;
    double t0 = 0.0;
    for (int k = 0; k < 4; ++k) {
        phases[k].label = labels[k];
        phases[k].isothermal = iso[k];
        phases[k].duration = durations[k];
        phases[k].shape_ref = SmoothMove{shape_points[k], shape_points[k + 1], t0, durations[k]};
        t0 += durations[k];
    }
    return phases;
}

}  // namespace

CarnotSchedule gas_piston_cycle(const GasPistonParams& p, double t_hot, double t_cold,
                                double v_start, double v_expand,
                                const std::array<double, 4>& durations, double omega, double step) {
    p.validate();
    if (!(t_hot > 0.0 && t_cold > 0.0)) throw ConfigError("gas piston cycle: temperatures must be > 0");
    if (!(v_start > 0.0 && v_expand > 0.0)) throw ConfigError("gas piston cycle: volumes must be > 0");
    if (v_expand == v_start) throw ConfigError("gas piston cycle: expansion must change the volume");

    const double v2 = gas_piston_adiabat_volume(p, t_hot, v_expand, t_cold);
    // The cold compression mirrors the hot expansion ratio so the entropy
    // swing cancels and the second adiabat returns exactly to v_start.
    const double v3 = v2 * (v_start / v_expand);
    const double v4 = gas_piston_adiabat_volume(p, t_cold, v3, t_hot);

    CarnotSchedule sched;
    sched.e1_hot = t_hot;
    sched.e1_cold = t_cold;
    sched.phases = four_moves(durations, {v_start, v_expand, v2, v3, v4});
    sched.shape_index = 0;
    sched.momentum_index = 1;
    sched.shape_rate = p.piston_area;
    sched.mass = p.piston_mass;
    sched.tracking_omega = omega;
    sched.step = step;

    sched.x0 = Vec(3);
    sched.x0 << gas_piston_entropy(p, t_hot, v_start), v_start, 0.0;
    return sched;
}

CarnotSchedule actuator_cycle(const ActuatorParams& p, double i_high, double i_low, double q_start,
                              double q_pull, const std::array<double, 4>& durations, double omega,
                              double step) {
    p.validate();
    if (!(i_high > 0.0 && i_low > 0.0)) throw ConfigError("actuator cycle: currents must be > 0");
    if (q_pull == q_start) throw ConfigError("actuator cycle: pull phase must move the armature");
    // Equal current levels are allowed: they produce a degenerate out-and-back
    // loop (zero-length switching legs) used by the cyclic supply audits.

    const double phi_a = actuator_inductance(p, q_start) * i_high;
    const double phi_b = actuator_inductance(p, q_pull) * i_high;
    const double q2 = actuator_position_for_inductance(p, phi_b / i_low);
    const double q3 = actuator_position_for_inductance(p, phi_a / i_low);
    const double q4 = actuator_position_for_inductance(p, phi_a / i_high);

    CarnotSchedule sched;
    sched.e1_hot = i_high;
    sched.e1_cold = i_low;
    sched.phases = four_moves(durations, {q_start, q_pull, q2, q3, q4});
    sched.shape_index = 0;
    sched.momentum_index = 1;
    sched.shape_rate = 1.0;
    sched.mass = p.mass;
    sched.tracking_omega = omega;
    sched.step = step;

    sched.x0 = Vec(3);
    sched.x0 << phi_a, q_start, 0.0;
    return sched;
}

}  // namespace phslab
