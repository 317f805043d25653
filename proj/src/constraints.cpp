#include "phslab/constraints.hpp"

#include <cmath>
#include <memory>

namespace phslab {

Vec adiabatic_input(const TwoPortPhs& sys, const Vec& x1, const Vec& x2) {
    const Vec e1 = sys.e1(x1, x2);
    const Vec rhs = sys.r1_or_zero(x1, x2) * e1 - sys.j1(x1, x2) * e1;
    return solve_checked(sys.g1, rhs, hessian_cond_limit, "adiabatic_input");
}

Vec isothermal_input(const TwoPortPhs& sys, const Vec& x1, const Vec& x2, const Vec& x2_dot) {
    if (x2_dot.size() != sys.n2)
        throw std::invalid_argument("isothermal_input: x2_dot size mismatch");
    const Mat h11 = sys.hess11(x1, x2);
    const Vec rhs = sys.hess12(x1, x2) * x2_dot;
    const Vec x1_dot = -solve_checked(h11, rhs, hessian_cond_limit, "isothermal_input");
    const Vec e1 = sys.e1(x1, x2);
    const Vec force = x1_dot + sys.r1_or_zero(x1, x2) * e1 - sys.j1(x1, x2) * e1;
    return solve_checked(sys.g1, force, hessian_cond_limit, "isothermal_input");
}

namespace {

InputLaw combined_law(const TwoPortPhs& sys, Port2Law u2_law, bool isothermal) {
    auto s = std::make_shared<const TwoPortPhs>(sys);
    return InputLaw::feedback([s, u2_law = std::move(u2_law), isothermal](double t, const Vec& x) {
        auto [x1, x2] = s->split_state(x);
        Vec u2 = u2_law(t, x);
        if (u2.size() != s->m2)
            throw std::invalid_argument("two-port law: port-2 input size mismatch");
        Vec u1;
        if (isothermal) {
            const Vec e2 = s->e2(x1, x2);
            Vec x2_dot = s->j2(x1, x2) * e2 - s->r2_or_zero(x1, x2) * e2;
            if (s->m2 > 0) x2_dot += s->g2(x1, x2) * u2;
            u1 = isothermal_input(*s, x1, x2, x2_dot);
        } else {
            u1 = adiabatic_input(*s, x1, x2);
        }
        Vec u(s->m());
        u.head(s->n1) = u1;
        u.tail(s->m2) = u2;
        return u;
    });
}

}  // namespace

InputLaw adiabatic_law(const TwoPortPhs& sys, Port2Law u2) {
    return combined_law(sys, std::move(u2), false);
}

InputLaw isothermal_law(const TwoPortPhs& sys, Port2Law u2) {
    return combined_law(sys, std::move(u2), true);
}

CyclicSupplyAudit cyclic_supply_audit(const PhsSystem& sys, const Trajectory& traj,
                                      double y1_tolerance, double closure_eps) {
    if (traj.size() < 2) throw std::invalid_argument("cyclic_supply_audit: trajectory too short");
    const int groups = sys.port_group_count();
    if (groups > 2)
        throw std::invalid_argument("cyclic_supply_audit: expects at most two port groups");

    CyclicSupplyAudit audit;
    audit.closure_error = (traj.states.back() - traj.states.front()).cwiseAbs().maxCoeff();

    const std::vector<int> port1 = sys.port_group(0);
    double variation = 0.0;
    const Vec& y0 = traj.outputs.front();
    for (const Vec& y : traj.outputs) {
        double v = 0.0;
        for (int c : port1) v = std::max(v, std::abs(y[c] - y0[c]));
        variation = std::max(variation, v);
    }
    audit.costate_variation = variation;

    double y1_scale = 0.0;
    for (int c : port1) y1_scale = std::max(y1_scale, std::abs(y0[c]));

    if (closure_eps < 0.0) closure_eps = closure_tolerance(traj.states.front());
    if (audit.closure_error > closure_eps) {
        audit.reason = "trajectory is not cyclic (closure error " +
                       std::to_string(audit.closure_error) + " > " + std::to_string(closure_eps) + ")";
        return audit;
    }
    if (variation > y1_tolerance * (1.0 + y1_scale)) {
        audit.reason = "port-1 co-state varies beyond tolerance (max deviation " +
                       std::to_string(variation) + ")";
        return audit;
    }

    audit.applicable = true;
    // Energy scale from the absolute supplied power, so the threshold tracks
    // how much energy actually moved through the ports.
    double scale = 1.0;
    for (int g = 0; g < groups; ++g) {
        const std::vector<int> coords = sys.port_group(g);
        double abs_supply = 0.0;
        for (std::size_t i = 1; i < traj.size(); ++i) {
            double p_prev = 0.0, p_cur = 0.0;
            for (int c : coords) {
                p_prev += traj.outputs[i - 1][c] * traj.inputs[i - 1][c];
                p_cur += traj.outputs[i][c] * traj.inputs[i][c];
            }
            abs_supply += 0.5 * traj.step * (std::abs(p_prev) + std::abs(p_cur));
        }
        scale = std::max(scale, abs_supply);
    }
    audit.tolerance = 1e-6 * scale;

    audit.port1_supplied = supplied_energy(traj, port1).back();
    audit.port2_supplied = groups == 2 ? supplied_energy(traj, sys.port_group(1)).back() : 0.0;
    audit.port1_ok = audit.port1_supplied >= -audit.tolerance;
    audit.port2_ok = audit.port2_supplied >= -audit.tolerance;
    return audit;
}

}  // namespace phslab
