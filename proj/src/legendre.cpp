#include "phslab/legendre.hpp"

#include <cmath>

namespace phslab {

namespace {

struct NewtonProblem {
    std::function<Vec(const Vec&)> residual;
    std::function<Mat(const Vec&)> jacobian;
};

struct NewtonResult {
    Vec x;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped Newton iteration; tolerance is an absolute bound on ||res||_inf.
NewtonResult damped_newton(const NewtonProblem& prob, const Vec& guess, double tol,
                           const std::string& context) {
    constexpr int max_iterations = 50;
    constexpr int max_halvings = 30;

    Vec x = guess;
    Vec res = prob.residual(x);
    double norm = res.cwiseAbs().maxCoeff();
    Vec best_x = x;
    double best_norm = norm;

    for (int it = 0; it < max_iterations; ++it) {
        if (norm < tol) return {x, norm, it};
        const Mat jac = prob.jacobian(x);
        const Vec dir = solve_checked(jac, -res, hessian_cond_limit, context);

        double alpha = 1.0;
        Vec x_next;
        Vec res_next;
        double norm_next = std::numeric_limits<double>::infinity();
        for (int halving = 0; halving <= max_halvings; ++halving) {
            x_next = x + alpha * dir;
            res_next = prob.residual(x_next);
            norm_next = all_finite(res_next) ? res_next.cwiseAbs().maxCoeff()
                                             : std::numeric_limits<double>::infinity();
            if (norm_next < norm) break;
            alpha *= 0.5;
        }
        x = x_next;
        res = res_next;
        norm = norm_next;
        if (norm < best_norm) {
            best_norm = norm;
            best_x = x;
        }
    }
    if (norm < tol) return {x, norm, max_iterations};
    throw SolveDivergence(context + ": no convergence after 50 iterations (best residual " +
                              std::to_string(best_norm) + ")",
                          best_x, best_norm);
}

}  // namespace

LegendrePoint partial_legendre(const TwoPortPhs& sys, const Vec& e1, const Vec& x2,
                               const Vec& x1_guess) {
    sys.validate();
    if (e1.size() != sys.n1 || x1_guess.size() != sys.n1)
        throw std::invalid_argument("partial_legendre: e1/guess must have size n1");
    if (x2.size() != sys.n2) throw std::invalid_argument("partial_legendre: x2 size mismatch");

    NewtonProblem prob;
    prob.residual = [&](const Vec& x1) -> Vec { return sys.e1(x1, x2) - e1; };
    prob.jacobian = [&](const Vec& x1) { return sys.hess11(x1, x2); };

    const double tol = 1e-10 * (1.0 + e1.cwiseAbs().maxCoeff());
    const NewtonResult sol = damped_newton(prob, x1_guess, tol, "partial_legendre");

    LegendrePoint pt;
    pt.x1 = sol.x;
    pt.value = sys.hamiltonian(sol.x, x2) - e1.dot(sol.x);
    pt.iterations = sol.iterations;
    pt.residual = sol.residual;
    return pt;
}

LegendreIdentityReport verify_legendre_identities(const TwoPortPhs& sys, const Vec& e1,
                                                  const Vec& x2, const Vec& x1_guess) {
    const LegendrePoint center = partial_legendre(sys, e1, x2, x1_guess);
    // All nearby transforms warm-start from the center solution, keeping the
    // finite differences on one Newton branch.
    auto value_at = [&](const Vec& e1v, const Vec& x2v) {
        return partial_legendre(sys, e1v, x2v, center.x1).value;
    };

    const Vec d_e1 = fd_gradient([&](const Vec& v) { return value_at(v, x2); }, e1);
    const Vec d_x2 = fd_gradient([&](const Vec& v) { return value_at(e1, v); }, x2);
    const Vec e2 = sys.e2(center.x1, x2);

    LegendreIdentityReport rep;
    rep.co_state_residual =
        (d_e1 + center.x1).cwiseAbs().maxCoeff() / (1.0 + center.x1.cwiseAbs().maxCoeff());
    rep.cross_residual = (d_x2 - e2).cwiseAbs().maxCoeff() / (1.0 + e2.cwiseAbs().maxCoeff());
    return rep;
}

InvolutionReport legendre_involution_check(const TwoPortPhs& sys, const Vec& x1, const Vec& x2) {
    const Vec e1 = sys.e1(x1, x2);
    const double h = sys.hamiltonian(x1, x2);

    // Dual viewed as a function of the co-state: gradient -x1(e1, x2) and
    // Hessian -(d2H/dx1^2)^-1 follow from differentiating the stationarity
    // condition, so the second transform needs no finite differences.
    auto solve_primal = [&](const Vec& e1v) { return partial_legendre(sys, e1v, x2, x1); };

    NewtonProblem dual;
    dual.residual = [&](const Vec& e1v) -> Vec { return -solve_primal(e1v).x1 + x1; };
    dual.jacobian = [&](const Vec& e1v) -> Mat {
        const LegendrePoint pt = solve_primal(e1v);
        const Mat hess = sys.hess11(pt.x1, x2);
        const double cond = condition_estimate(hess);
        if (!(cond < hessian_cond_limit))
            throw NumericalError("legendre involution: singular x1-block Hessian");
        return -hess.inverse();
    };

    const double tol = 1e-10 * (1.0 + x1.cwiseAbs().maxCoeff());
    // Deliberately offset start: recovery must not depend on starting at the
    // known answer.
    const Vec start = e1 * 1.25 + Vec::Constant(e1.size(), 0.1);
    const NewtonResult sol = damped_newton(dual, start, tol, "legendre involution");

    const LegendrePoint pt = solve_primal(sol.x);
    const double h_rec = pt.value + sol.x.dot(x1);

    InvolutionReport rep;
    rep.co_state_error = (sol.x - e1).cwiseAbs().maxCoeff() / (1.0 + e1.cwiseAbs().maxCoeff());
    rep.value_error = std::abs(h_rec - h) / (1.0 + std::abs(h));
    return rep;
}

}  // namespace phslab
