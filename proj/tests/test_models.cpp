#include <doctest.h>

#include <phslab/integrate.hpp>
#include <phslab/models.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace phslab;
using testing::make_rng;
using testing::sample_states;

TEST_SUITE_BEGIN("models");

// ============================================================================
// Gas piston
// ============================================================================

TEST_CASE("gas pressure satisfies the ideal-gas law on random states") {
    const GasPistonParams p;
    const TwoPortPhs two = make_gas_piston(p);
    auto rng = make_rng(10);
    for (const Vec& x : sample_states(gas_piston_domain(p), 1000, rng)) {
        auto [x1, x2] = two.split_state(x);
        const double pressure = -two.e2(x1, x2)[0];
        const double t = gas_piston_temperature(p, x1[0], x2[0]);
        const double ideal = p.n_mol * gas_constant * t / x2[0];
        REQUIRE(testing::rel_err(pressure, ideal) < 1e-10);
        REQUIRE(two.e1(x1, x2)[0] == doctest::Approx(t).epsilon(1e-12));
    }
}

TEST_CASE("temperature and entropy maps invert each other") {
    const GasPistonParams p;
    CHECK(gas_piston_temperature(p, p.s_ref, p.v_ref) == doctest::Approx(p.t_ref).epsilon(1e-14));
    for (double t : {150.0, 300.0, 517.25}) {
        for (double v : {0.4e-3, 1e-3, 3.7e-3}) {
            const double s = gas_piston_entropy(p, t, v);
            CHECK(gas_piston_temperature(p, s, v) == doctest::Approx(t).epsilon(1e-12));
        }
    }
}

TEST_CASE("adiabat volume follows T V^(R/c_v) = const") {
    const GasPistonParams p;  // c_v = 1.5 R, so c_v / R = 1.5
    const double v2 = gas_piston_adiabat_volume(p, 400.0, 1e-3, 300.0);
    CHECK(v2 == doctest::Approx(1e-3 * std::pow(4.0 / 3.0, 1.5)).epsilon(1e-14));
    // Round trip back to the start.
    CHECK(gas_piston_adiabat_volume(p, 300.0, v2, 400.0) == doctest::Approx(1e-3).epsilon(1e-13));
}

TEST_CASE("free piston expansion conserves energy and entropy") {
    // A light piston against a vacuum is blasted off by the chamber pressure
    // (about 2.5 MPa at the reference state) and integrates poorly; a heavy
    // piston keeps the expansion gentle so RK4 error stays near roundoff.
    GasPistonParams p;
    p.piston_mass = 1e6;
    const PhsSystem sys = embed_two_port(make_gas_piston(p));
    const Vec x0 = (Vec(3) << 0.0, p.v_ref, 0.02 * p.piston_mass).finished();
    const Trajectory traj = simulate(sys, x0, InputLaw::zero(2), {.t_end = 2.0, .step = 1e-4});

    double h_drift = 0.0;
    for (double h : traj.energies) h_drift = std::max(h_drift, std::abs(h - traj.energies[0]));
    CHECK(h_drift < 1e-9 * (1.0 + std::abs(traj.energies[0])));
    // Port 1 is untouched, so the entropy coordinate never moves.
    for (const Vec& x : traj.states) REQUIRE(x[0] == 0.0);
}

TEST_CASE("gas piston rejects a collapsed chamber") {
    const GasPistonParams p;
    const TwoPortPhs two = make_gas_piston(p);
    CHECK_THROWS_AS((void)two.e1((Vec(1) << 0.0).finished(), (Vec(2) << -1e-4, 0.0).finished()),
                    NumericalError);
    CHECK_THROWS_AS((void)gas_piston_temperature(p, 0.0, 0.0), NumericalError);
}

TEST_CASE("gas piston parameter validation") {
    GasPistonParams p;
    p.n_mol = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.piston_friction = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    CHECK_NOTHROW(p.validate());
}

// ============================================================================
// Actuator
// ============================================================================

TEST_CASE("actuator inductance law and its inverse") {
    ActuatorParams p;  // l0 = 1, gap = 0.05
    CHECK(actuator_inductance(p, 0.0) == 1.0);
    CHECK(actuator_inductance(p, 0.05) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(actuator_inductance_slope(p, 0.05) == doctest::Approx(-5.0).epsilon(1e-14));
    CHECK(actuator_position_for_inductance(p, 0.5) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK_THROWS_AS((void)actuator_inductance(p, -0.05), NumericalError);
}

TEST_CASE("actuator dynamics at a frozen point") {
    ActuatorParams p;
    const PhsSystem sys = embed_two_port(make_actuator(p));
    // At (phi, q, p) = (1, 0.05, 0): L = 1/2, I = 2, dH/dq = -phi^2 L' / (2 L^2) = 10.
    const Vec x = (Vec(3) << 1.0, 0.05, 0.0).finished();
    CHECK(sys.hamiltonian(x) == doctest::Approx(1.0).epsilon(1e-15));
    const Vec y = sys.output(x);
    CHECK(y[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(y[1] == 0.0);
    const Vec dx = sys.dynamics(x, Vec::Zero(2));
    CHECK(dx[0] == 0.0);
    CHECK(dx[1] == 0.0);
    CHECK(dx[2] == doctest::Approx(-10.0).epsilon(1e-13));
}

TEST_CASE("free actuator conserves energy") {
    const ActuatorParams p;
    const PhsSystem sys = embed_two_port(make_actuator(p));
    const Vec x0 = (Vec(3) << 0.4, 0.2, 0.0).finished();
    const Trajectory traj = simulate(sys, x0, InputLaw::zero(2), {.t_end = 0.5, .step = 1e-4});
    for (double h : traj.energies)
        REQUIRE(std::abs(h - traj.energies[0]) < 1e-9 * (1.0 + std::abs(traj.energies[0])));
}

// ============================================================================
// Heat exchanger
// ============================================================================

TEST_CASE("heat exchanger rates at a frozen state") {
    const HeatExchangerParams p{10.0, 10.0, 300.0, 2.0};
    const PhsSystem sys = make_heat_exchanger(p);
    const Vec x = (Vec(2) << heat_exchanger_entropy(p, 1, 300.0),
                   heat_exchanger_entropy(p, 2, 400.0))
                      .finished();
    CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(10.0 * std::log(4.0 / 3.0)).epsilon(1e-14));

    const Vec dx = sys.dynamics(x, Vec::Zero(2));
    CHECK(dx[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(-0.5).epsilon(1e-12));
    // Entropy production lambda (T1 - T2)^2 / (T1 T2) = 1/6; energy moves
    // conservatively: T1 dS1 + T2 dS2 = 0.
    CHECK(dx.sum() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    const Vec e = sys.co_state(x);
    CHECK(std::abs(e[0] * dx[0] + e[1] * dx[1]) < 1e-9);
    // Outputs are the temperatures (G = I).
    CHECK(e[0] == doctest::Approx(300.0).epsilon(1e-13));
    CHECK(e[1] == doctest::Approx(400.0).epsilon(1e-13));
}

TEST_CASE("isolated heat exchanger equilibrates with entropy growth") {
    const HeatExchangerParams p{10.0, 10.0, 300.0, 2.0};
    const PhsSystem sys = make_heat_exchanger(p);
    const Vec x0 =
        (Vec(2) << 0.0, heat_exchanger_entropy(p, 2, 400.0)).finished();
    const Trajectory traj = simulate(sys, x0, InputLaw::zero(2), {.t_end = 40.0, .step = 1e-3});

    // Energy conserved to integrator accuracy.
    for (double h : traj.energies)
        REQUIRE(std::abs(h - traj.energies[0]) < 1e-9 * std::abs(traj.energies[0]));
    // Total entropy never decreases between samples.
    for (std::size_t i = 1; i < traj.size(); ++i)
        REQUIRE(traj.states[i].sum() >= traj.states[i - 1].sum() - 1e-12);
    // Both temperatures approach the energy-weighted mean 350 K.
    const Vec t_end = sys.co_state(traj.states.back());
    CHECK(t_end[0] == doctest::Approx(350.0).epsilon(1e-3));
    CHECK(t_end[1] == doctest::Approx(350.0).epsilon(1e-3));
    CHECK(std::abs(t_end[0] - t_end[1]) < 0.05);
}

TEST_CASE("equal temperatures are an equilibrium") {
    const HeatExchangerParams p;
    const PhsSystem sys = make_heat_exchanger(p);
    const Vec x = (Vec(2) << heat_exchanger_entropy(p, 1, 330.0),
                   heat_exchanger_entropy(p, 2, 330.0))
                      .finished();
    CHECK(sys.dynamics(x, Vec::Zero(2)).cwiseAbs().maxCoeff() < 1e-12);
}

// ============================================================================
// Mass-spring-damper and scalar system
// ============================================================================

TEST_CASE("damped oscillator loses energy monotonically") {
    const PhsSystem sys = make_msd({1.0, 1.0, 0.4});
    const Vec x0 = (Vec(2) << 1.0, 0.0).finished();
    const Trajectory traj = simulate(sys, x0, InputLaw::zero(1), {.t_end = 10.0, .step = 1e-3});
    for (std::size_t i = 1; i < traj.size(); ++i)
        REQUIRE(traj.energies[i] <= traj.energies[i - 1] + 1e-12);
    CHECK(traj.energies.back() < 0.05 * traj.energies.front());
}

TEST_CASE("scalar exponential system basics") {
    const PhsSystem sys = make_scalar_exp();
    const Vec x = (Vec(1) << 1.0).finished();
    CHECK(sys.hamiltonian(x) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(sys.output(x)[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(sys.dynamics(x, (Vec(1) << 0.25).finished())[0] == 0.25);
}

TEST_CASE("model parameter validation rejects nonsense") {
    ActuatorParams a;
    a.gap = 0.0;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    HeatExchangerParams h;
    h.conductance = -1.0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    MsdParams m;
    m.mass = 0.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = {};
    m.damping = -0.5;
    CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_SUITE_END();
