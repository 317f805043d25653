#include <doctest.h>

#include <phslab/constraints.hpp>
#include <phslab/integrate.hpp>
#include <phslab/legendre.hpp>
#include <phslab/models.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace phslab;
using testing::make_rng;
using testing::sample_states;

namespace {

/// Coupled quadratic two-port: H = a x1^2 / 2 + c x1 x2 + b x2^2 / 2.
TwoPortPhs make_quadratic(double a, double b, double c) {
    TwoPortPhs sys;
    sys.n1 = 1;
    sys.n2 = 1;
    sys.m2 = 1;
    sys.hamiltonian = [=](const Vec& x1, const Vec& x2) {
        return 0.5 * a * x1[0] * x1[0] + c * x1[0] * x2[0] + 0.5 * b * x2[0] * x2[0];
    };
    sys.grad_x1 = [=](const Vec& x1, const Vec& x2) {
        return (Vec(1) << a * x1[0] + c * x2[0]).finished();
    };
    sys.grad_x2 = [=](const Vec& x1, const Vec& x2) {
        return (Vec(1) << c * x1[0] + b * x2[0]).finished();
    };
    sys.j1 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    sys.j2 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    sys.g1 = Mat::Identity(1, 1);
    sys.g2 = [](const Vec&, const Vec&) { return Mat::Identity(1, 1); };
    sys.hessian11 = [=](const Vec&, const Vec&) { return (Mat(1, 1) << a).finished(); };
    sys.hessian12 = [=](const Vec&, const Vec&) { return (Mat(1, 1) << c).finished(); };
    sys.state_labels = {"x1", "x2"};
    sys.port_labels = {"p1", "p2"};
    return sys;
}

}  // namespace

TEST_SUITE_BEGIN("legendre");

TEST_CASE("quadratic transform matches its closed form") {
    const TwoPortPhs sys = make_quadratic(2.0, 3.0, 0.5);
    SUBCASE("solved point, decoupling cancellation") {
        const LegendrePoint pt = partial_legendre(sys, (Vec(1) << 1.0).finished(),
                                                  (Vec(1) << 2.0).finished(),
                                                  (Vec(1) << 0.7).finished());
        CHECK(std::abs(pt.x1[0]) < 1e-12);
        CHECK(pt.value == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(pt.residual < 1e-10 * 2.0);
    }
    SUBCASE("generic point") {
        const LegendrePoint pt = partial_legendre(sys, (Vec(1) << 2.0).finished(),
                                                  (Vec(1) << -1.0).finished(),
                                                  (Vec(1) << 0.0).finished());
        CHECK(pt.x1[0] == doctest::Approx(1.25).epsilon(1e-12));
        CHECK(pt.value == doctest::Approx(-0.0625).epsilon(1e-10));
    }
}

TEST_CASE("actuator transform has the constant-current closed form") {
    // At fixed current I the dual energy is -L(q) I^2 / 2 + p^2 / (2m).
    const ActuatorParams p;
    const TwoPortPhs sys = make_actuator(p);
    const Vec x2 = (Vec(2) << 0.05, 0.6).finished();  // L = 1/2
    const LegendrePoint pt = partial_legendre(sys, (Vec(1) << 2.0).finished(), x2,
                                              (Vec(1) << 0.3).finished());
    CHECK(pt.x1[0] == doctest::Approx(1.0).epsilon(1e-12));  // phi = L I
    CHECK(pt.value == doctest::Approx(-1.0 + 0.18).epsilon(1e-12));
}

TEST_CASE("gas transform matches the constant-temperature closed form") {
    // At fixed temperature T the dual energy is n c_v T + pi^2/(2m) - T S(T, V).
    const GasPistonParams p;
    const TwoPortPhs sys = make_gas_piston(p);
    const double t_hold = 350.0;
    const Vec x2 = (Vec(2) << 1.5e-3, 0.2).finished();
    const double s = gas_piston_entropy(p, t_hold, x2[0]);
    const LegendrePoint pt = partial_legendre(sys, (Vec(1) << t_hold).finished(), x2,
                                              (Vec(1) << 0.0).finished());
    // Newton stops at a gradient residual of 1e-10 * (1 + |e1|) ~ 3.5e-8,
    // which maps to a few parts in 1e10 of entropy; allow 1e-8 relative.
    CHECK(pt.x1[0] == doctest::Approx(s).epsilon(1e-8));
    const double expected = p.n_mol * p.c_v * t_hold + 0.02 / p.piston_mass - t_hold * s;
    CHECK(pt.value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("first-order identities hold on random states") {
    auto rng = make_rng(20);
    auto check_model = [&](const TwoPortPhs& sys, const StateBox& box) {
        for (const Vec& x : sample_states(box, 100, rng)) {
            auto [x1, x2] = sys.split_state(x);
            const Vec e1 = sys.e1(x1, x2);
            const LegendreIdentityReport rep = verify_legendre_identities(sys, e1, x2, x1);
            REQUIRE(rep.co_state_residual < 1e-5);
            REQUIRE(rep.cross_residual < 1e-5);
        }
    };
    check_model(make_gas_piston({}), gas_piston_domain({}));
    check_model(make_actuator({}), actuator_domain({}));
    check_model(make_quadratic(2.0, 3.0, 0.5), StateBox{Vec::Constant(2, -2.0), Vec::Constant(2, 2.0)});
}

TEST_CASE("the transform is an involution") {
    auto rng = make_rng(21);
    auto check_model = [&](const TwoPortPhs& sys, const StateBox& box) {
        for (const Vec& x : sample_states(box, 100, rng)) {
            auto [x1, x2] = sys.split_state(x);
            const InvolutionReport rep = legendre_involution_check(sys, x1, x2);
            REQUIRE(rep.co_state_error < 1e-8);
            REQUIRE(rep.value_error < 1e-8);
        }
    };
    check_model(make_gas_piston({}), gas_piston_domain({}));
    check_model(make_actuator({}), actuator_domain({}));
}

TEST_CASE("dual energy tracks port-2 supply while the co-state is held") {
    // Along a run with e1 held constant, d/dt H1*(e1, x2) = y2^T u2. A heavy
    // piston keeps the expansion gentle: the chamber pressure (~2.5 MPa at the
    // reference state) acts against vacuum, and a light piston would turn the
    // run into a violent blow-off dominated by integration error.
    GasPistonParams p;
    p.piston_mass = 1e6;
    const TwoPortPhs two = make_gas_piston(p);
    const PhsSystem sys = embed_two_port(two);
    const Vec x0 = (Vec(3) << 0.0, p.v_ref, 0.0).finished();

    const InputLaw law = isothermal_law(two, [](double t, const Vec&) {
        return (Vec(1) << 1.5 * std::sin(3.0 * t)).finished();
    });
    const Trajectory traj = simulate(sys, x0, law, {.t_end = 1.0, .step = 1e-4});
    const std::vector<double> w2 = supplied_energy(traj, {1});

    const Vec e1_held = (Vec(1) << p.t_ref).finished();
    Vec guess = (Vec(1) << 0.0).finished();
    auto dual_value = [&](std::size_t i) {
        auto [x1, x2] = two.split_state(traj.states[i]);
        const LegendrePoint pt = partial_legendre(two, e1_held, x2, guess);
        guess = pt.x1;
        return pt.value;
    };
    const double h0 = dual_value(0);
    for (std::size_t i = 500; i < traj.size(); i += 500) {
        const double delta = dual_value(i) - h0;
        REQUIRE(std::abs(delta - w2[i]) < 1e-8 * (1.0 + std::abs(w2[i])));
    }
}

TEST_CASE("an unreachable gas temperature ends in a singularity diagnostic") {
    // A negative temperature target sends Newton racing toward S = -inf; the
    // temperature underflows to zero and the 1x1 Hessian U_SS = T/(n c_v)
    // becomes exactly singular, which surfaces as the conditioning error.
    const TwoPortPhs sys = make_gas_piston({});
    const Vec x2 = (Vec(2) << 1e-3, 0.0).finished();
    CHECK_THROWS_AS(
        (void)partial_legendre(sys, (Vec(1) << -5.0).finished(), x2, (Vec(1) << 0.0).finished()),
        NumericalError);
}

TEST_CASE("slow convergence raises a divergence carrying the best iterate") {
    // Gradient x1^5 with target 0 from a huge guess: Newton contracts by
    // exactly 4/5 per iteration (x <- x - x/5, no damping ever triggers), so
    // after the 50-iteration budget the best iterate is 1e4 * 0.8^50 and its
    // residual (1e4 * 0.8^50)^5 is still far above the 1e-10 stop threshold.
    TwoPortPhs sys;
    sys.n1 = 1;
    sys.n2 = 1;
    sys.m2 = 1;
    sys.hamiltonian = [](const Vec& x1, const Vec& x2) {
        return std::pow(x1[0], 6) / 6.0 + 0.5 * x2[0] * x2[0];
    };
    sys.grad_x1 = [](const Vec& x1, const Vec&) {
        return (Vec(1) << std::pow(x1[0], 5)).finished();
    };
    sys.grad_x2 = [](const Vec&, const Vec& x2) { return x2; };
    sys.hessian11 = [](const Vec& x1, const Vec&) {
        return (Mat(1, 1) << 5.0 * std::pow(x1[0], 4)).finished();
    };
    sys.hessian12 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    sys.j1 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    sys.j2 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    sys.g1 = Mat::Identity(1, 1);
    sys.g2 = [](const Vec&, const Vec&) { return Mat::Identity(1, 1); };

    const double expected_best = 1e4 * std::pow(0.8, 50);
    try {
        (void)partial_legendre(sys, (Vec(1) << 0.0).finished(), (Vec(1) << 0.0).finished(),
                               (Vec(1) << 1e4).finished());
        FAIL("expected SolveDivergence");
    } catch (const SolveDivergence& err) {
        REQUIRE(err.best.size() == 1);
        CHECK(all_finite(err.best));
        CHECK(err.best[0] == doctest::Approx(expected_best).epsilon(1e-9));
        CHECK(err.residual == doctest::Approx(std::pow(expected_best, 5)).epsilon(1e-8));
    }
}

TEST_CASE("a singular block Hessian raises a numerical error") {
    TwoPortPhs sys = make_quadratic(1.0, 1.0, 0.0);
    sys.hamiltonian = [](const Vec& x1, const Vec& x2) {
        return 0.25 * std::pow(x1[0], 4) + 0.5 * x2[0] * x2[0];
    };
    sys.grad_x1 = [](const Vec& x1, const Vec&) {
        return (Vec(1) << std::pow(x1[0], 3)).finished();
    };
    sys.hessian11 = [](const Vec& x1, const Vec&) {
        return (Mat(1, 1) << 3.0 * x1[0] * x1[0]).finished();
    };
    sys.hessian12 = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    CHECK_THROWS_AS((void)partial_legendre(sys, (Vec(1) << 1.0).finished(), Vec::Zero(1),
                                           Vec::Zero(1)),
                    NumericalError);
}

TEST_SUITE_END();
