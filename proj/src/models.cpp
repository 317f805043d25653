#include "phslab/models.hpp"

#include <cmath>

namespace phslab {

namespace {

void check(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

[[noreturn]] void domain_error(const std::string& what) { throw NumericalError(what); }

}  // namespace

// ----------------------------------------------------------------------------
// Gas-piston chamber
// ----------------------------------------------------------------------------

void GasPistonParams::validate() const {
    check(n_mol > 0.0, "gas piston: n_mol must be > 0");
    check(c_v > 0.0, "gas piston: c_v must be > 0");
    check(t_ref > 0.0 && v_ref > 0.0, "gas piston: reference state must be positive");
    check(piston_area > 0.0 && piston_mass > 0.0, "gas piston: piston geometry must be positive");
    check(piston_friction >= 0.0, "gas piston: piston friction must be >= 0");
}

double gas_piston_temperature(const GasPistonParams& p, double s, double v) {
    if (!(v > 0.0)) domain_error("gas piston: volume must stay positive, got V = " + std::to_string(v));
    const double ncv = p.n_mol * p.c_v;
    return p.t_ref * std::exp((s - p.s_ref) / ncv) * std::pow(v / p.v_ref, -gas_constant / p.c_v);
}

double gas_piston_entropy(const GasPistonParams& p, double t, double v) {
    check(t > 0.0 && v > 0.0, "gas piston: entropy lookup needs T > 0, V > 0");
    const double ncv = p.n_mol * p.c_v;
    return p.s_ref + ncv * (std::log(t / p.t_ref) + (gas_constant / p.c_v) * std::log(v / p.v_ref));
}

double gas_piston_adiabat_volume(const GasPistonParams& p, double t_start, double v_start,
                                 double t_target) {
    check(t_start > 0.0 && t_target > 0.0 && v_start > 0.0,
          "gas piston: adiabat endpoints must be positive");
    return v_start * std::pow(t_start / t_target, p.c_v / gas_constant);
}

TwoPortPhs make_gas_piston(const GasPistonParams& params) {
    params.validate();
    const GasPistonParams p = params;
    const double ncv = p.n_mol * p.c_v;
    const double ratio = gas_constant / p.c_v;

    TwoPortPhs s;
    s.n1 = 1;
    s.n2 = 2;
    s.m2 = 1;
    s.state_labels = {"S", "V", "pi"};
    s.port_labels = {"heat", "piston"};

    auto temperature = [p](const Vec& x1, const Vec& x2) {
        return gas_piston_temperature(p, x1[0], x2[0]);
    };

    s.hamiltonian = [p, ncv, temperature](const Vec& x1, const Vec& x2) {
        const double u_int = ncv * temperature(x1, x2);
        return u_int + x2[1] * x2[1] / (2.0 * p.piston_mass);
    };
    s.grad_x1 = [temperature](const Vec& x1, const Vec& x2) {
        return Vec::Constant(1, temperature(x1, x2));
    };
    s.grad_x2 = [p, temperature](const Vec& x1, const Vec& x2) {
        const double t = temperature(x1, x2);
        const double pressure = p.n_mol * gas_constant * t / x2[0];
        Vec g(2);
        g << -pressure, x2[1] / p.piston_mass;
        return g;
    };
    s.hessian11 = [ncv, temperature](const Vec& x1, const Vec& x2) {
        return Mat::Constant(1, 1, temperature(x1, x2) / ncv);
    };
    s.hessian12 = [ratio, temperature](const Vec& x1, const Vec& x2) {
        Mat h(1, 2);
        h << -ratio * temperature(x1, x2) / x2[0], 0.0;
        return h;
    };
    s.j1 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    s.j2 = [a = p.piston_area](const Vec&, const Vec&) {
        Mat j(2, 2);
        j << 0.0, a, -a, 0.0;
        return j;
    };
    if (p.piston_friction > 0.0) {
        s.r2 = [c = p.piston_friction](const Vec&, const Vec&) {
            Mat r = Mat::Zero(2, 2);
            r(1, 1) = c;
            return r;
        };
    }
    s.g1 = Mat::Identity(1, 1);
    s.g2 = [](const Vec&, const Vec&) {
        Mat g(2, 1);
        g << 0.0, 1.0;
        return g;
    };
    return s;
}

StateBox gas_piston_domain(const GasPistonParams& p) {
    const double ncv = p.n_mol * p.c_v;
    StateBox box;
    box.lo = Vec(3);
    box.hi = Vec(3);
    box.lo << p.s_ref - ncv * std::log(2.0), 0.5 * p.v_ref, -5.0;
    box.hi << p.s_ref + ncv * std::log(2.0), 4.0 * p.v_ref, 5.0;
    return box;
}

// ----------------------------------------------------------------------------
// Electromagnetic plunger actuator
// ----------------------------------------------------------------------------

void ActuatorParams::validate() const {
    check(l0 > 0.0, "actuator: l0 must be > 0");
    check(gap > 0.0, "actuator: gap must be > 0");
    check(mass > 0.0, "actuator: mass must be > 0");
}

double actuator_inductance(const ActuatorParams& p, double q) {
    if (!(q > -p.gap))
        domain_error("actuator: position outside domain (q <= -a), q = " + std::to_string(q));
    return p.l0 * p.gap / (p.gap + q);
}

double actuator_inductance_slope(const ActuatorParams& p, double q) {
    const double l = actuator_inductance(p, q);
    return -l / (p.gap + q);
}

double actuator_position_for_inductance(const ActuatorParams& p, double l) {
    check(l > 0.0, "actuator: inductance must be positive");
    return p.gap * (p.l0 / l - 1.0);
}

TwoPortPhs make_actuator(const ActuatorParams& params) {
    params.validate();
    const ActuatorParams p = params;

    TwoPortPhs s;
    s.n1 = 1;
    s.n2 = 2;
    s.m2 = 1;
    s.state_labels = {"phi", "q", "p"};
    s.port_labels = {"coil", "mech"};

    s.hamiltonian = [p](const Vec& x1, const Vec& x2) {
        const double l = actuator_inductance(p, x2[0]);
        return x1[0] * x1[0] / (2.0 * l) + x2[1] * x2[1] / (2.0 * p.mass);
    };
    s.grad_x1 = [p](const Vec& x1, const Vec& x2) {
        return Vec::Constant(1, x1[0] / actuator_inductance(p, x2[0]));
    };
    s.grad_x2 = [p](const Vec& x1, const Vec& x2) {
        const double l = actuator_inductance(p, x2[0]);
        const double dl = actuator_inductance_slope(p, x2[0]);
        Vec g(2);
        g << -x1[0] * x1[0] * dl / (2.0 * l * l), x2[1] / p.mass;
        return g;
    };
    s.hessian11 = [p](const Vec&, const Vec& x2) {
        return Mat::Constant(1, 1, 1.0 / actuator_inductance(p, x2[0]));
    };
    s.hessian12 = [p](const Vec& x1, const Vec& x2) {
        const double l = actuator_inductance(p, x2[0]);
        const double dl = actuator_inductance_slope(p, x2[0]);
        Mat h(1, 2);
        h << -x1[0] * dl / (l * l), 0.0;
        return h;
    };
    s.j1 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    s.j2 = [](const Vec&, const Vec&) {
        Mat j(2, 2);
        j << 0.0, 1.0, -1.0, 0.0;
        return j;
    };
    s.g1 = Mat::Identity(1, 1);
    s.g2 = [](const Vec&, const Vec&) {
        Mat g(2, 1);
        g << 0.0, 1.0;
        return g;
    };
    return s;
}

StateBox actuator_domain(const ActuatorParams& p) {
    StateBox box;
    box.lo = Vec(3);
    box.hi = Vec(3);
    box.lo << -2.0, 0.0, -3.0;
    box.hi << 2.0, 100.0 * p.gap, 3.0;
    return box;
}

// ----------------------------------------------------------------------------
// Two-body heat exchanger
// ----------------------------------------------------------------------------

void HeatExchangerParams::validate() const {
    check(c1 > 0.0 && c2 > 0.0, "heat exchanger: capacities must be > 0");
    check(t_ref > 0.0, "heat exchanger: t_ref must be > 0");
    check(conductance >= 0.0, "heat exchanger: conductance must be >= 0");
}

double heat_exchanger_entropy(const HeatExchangerParams& p, int body, double t) {
    check(body == 1 || body == 2, "heat exchanger: body index must be 1 or 2");
    check(t > 0.0, "heat exchanger: temperature must be > 0");
    const double c = body == 1 ? p.c1 : p.c2;
    return c * std::log(t / p.t_ref);
}

PhsSystem make_heat_exchanger(const HeatExchangerParams& params) {
    params.validate();
    const HeatExchangerParams p = params;

    auto temps = [p](const Vec& x) {
        return std::pair<double, double>{p.t_ref * std::exp(x[0] / p.c1),
                                         p.t_ref * std::exp(x[1] / p.c2)};
    };

    PhsSystem s;
    s.n = 2;
    s.m = 2;
    s.state_labels = {"S1", "S2"};
    s.port_labels = {"body1", "body2"};
    s.port_split = {1, 1};

    s.hamiltonian = [p, temps](const Vec& x) {
        auto [t1, t2] = temps(x);
        return p.c1 * t1 + p.c2 * t2;
    };
    s.gradient = [temps](const Vec& x) {
        auto [t1, t2] = temps(x);
        Vec e(2);
        e << t1, t2;
        return e;
    };
    s.structure = [p, temps](const Vec& x) {
        auto [t1, t2] = temps(x);
        const double w = p.conductance * (t2 - t1) / (t1 * t2);
        Mat j(2, 2);
        j << 0.0, w, -w, 0.0;
        return j;
    };
    s.input_map = [](const Vec&) { return Mat::Identity(2, 2); };
    return s;
}

StateBox heat_exchanger_domain(const HeatExchangerParams& p) {
    StateBox box;
    box.lo = Vec(2);
    box.hi = Vec(2);
    box.lo << heat_exchanger_entropy(p, 1, 200.0), heat_exchanger_entropy(p, 2, 200.0);
    box.hi << heat_exchanger_entropy(p, 1, 600.0), heat_exchanger_entropy(p, 2, 600.0);
    return box;
}

// ----------------------------------------------------------------------------
// Mass-spring-damper
// ----------------------------------------------------------------------------

void MsdParams::validate() const {
    check(mass > 0.0, "msd: mass must be > 0");
    check(stiffness > 0.0, "msd: stiffness must be > 0");
    check(damping >= 0.0, "msd: damping must be >= 0");
}

PhsSystem make_msd(const MsdParams& params) {
    params.validate();
    const MsdParams p = params;

    PhsSystem s;
    s.n = 2;
    s.m = 1;
    s.state_labels = {"q", "p"};
    s.port_labels = {"mech"};

    s.hamiltonian = [p](const Vec& x) {
        return 0.5 * p.stiffness * x[0] * x[0] + x[1] * x[1] / (2.0 * p.mass);
    };
    s.gradient = [p](const Vec& x) {
        Vec e(2);
        e << p.stiffness * x[0], x[1] / p.mass;
        return e;
    };
    s.structure = [](const Vec&) {
        Mat j(2, 2);
        j << 0.0, 1.0, -1.0, 0.0;
        return j;
    };
    if (p.damping > 0.0) {
        s.dissipation = [d = p.damping](const Vec&, const Vec& e) {
            Vec r(2);
            r << 0.0, d * e[1];
            return r;
        };
    }
    s.input_map = [](const Vec&) {
        Mat g(2, 1);
        g << 0.0, 1.0;
        return g;
    };
    return s;
}

StateBox msd_domain(const MsdParams&) {
    StateBox box;
    box.lo = Vec(2);
    box.hi = Vec(2);
    box.lo << -2.0, -2.0;
    box.hi << 2.0, 2.0;
    return box;
}

// ----------------------------------------------------------------------------
// Scalar exponential-storage system
// ----------------------------------------------------------------------------

PhsSystem make_scalar_exp() {
    PhsSystem s;
    s.n = 1;
    s.m = 1;
    s.state_labels = {"x"};
    s.port_labels = {"u"};
    s.hamiltonian = [](const Vec& x) { return std::exp(x[0]); };
    s.gradient = [](const Vec& x) { return Vec::Constant(1, std::exp(x[0])); };
    s.structure = [](const Vec&) { return Mat::Zero(1, 1); };
    s.input_map = [](const Vec&) { return Mat::Identity(1, 1); };
    return s;
}

StateBox scalar_exp_domain() {
    StateBox box;
    box.lo = Vec::Constant(1, -2.0);
    box.hi = Vec::Constant(1, 2.0);
    return box;
}

}  // namespace phslab
