#include "phslab/numerics.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace phslab {

namespace {

double fd_step(double xi) { return fd_scale * std::max(1.0, std::abs(xi)); }

}  // namespace

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
    Vec g(x.size());
    Vec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = fd_step(x[i]);
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
    Vec xp = x;
    Mat j;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = fd_step(x[i]);
        xp[i] = x[i] + h;
        const Vec fp = f(xp);
        xp[i] = x[i] - h;
        const Vec fm = f(xp);
        xp[i] = x[i];
        if (j.size() == 0) j.resize(fp.size(), x.size());
        j.col(i) = (fp - fm) / (2.0 * h);
    }
    return j;
}

Mat fd_hessian(const std::function<Vec(const Vec&)>& grad, const Vec& x) {
    const Mat j = fd_jacobian(grad, x);
    return 0.5 * (j + j.transpose());
}

double condition_estimate(const Mat& a) {
    const Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
    const Mat inv = lu.inverse();
    const double na = a.cwiseAbs().rowwise().sum().maxCoeff();
    const double ni = inv.cwiseAbs().rowwise().sum().maxCoeff();
    return na * ni;
}

Vec solve_checked(const Mat& a, const Vec& b, double cond_limit, const std::string& context) {
    const double cond = condition_estimate(a);
    if (!(cond < cond_limit)) {
        throw NumericalError(context + ": matrix singular or ill-conditioned (cond ~ " +
                             std::to_string(cond) + ")");
    }
    return a.fullPivLu().solve(b);
}

bool all_finite(const Vec& v) { return v.allFinite(); }

double SmoothRamp::value(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double SmoothRamp::d1(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 30.0 * s * s * (1.0 + s * (-2.0 + s));
}

double SmoothRamp::d2(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 60.0 * s * (1.0 + s * (-3.0 + 2.0 * s));
}

double SmoothRamp::d3(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 60.0 + s * (-360.0 + 360.0 * s);
}

double SmoothMove::pos(double t) const { return from + (to - from) * SmoothRamp::value((t - t0) / tau); }

double SmoothMove::vel(double t) const { return (to - from) / tau * SmoothRamp::d1((t - t0) / tau); }

double SmoothMove::acc(double t) const {
    return (to - from) / (tau * tau) * SmoothRamp::d2((t - t0) / tau);
}

std::uint64_t sampling_seed(std::uint64_t fallback) {
    const char* env = std::getenv("PHS_LAB_SEED");
    if (env == nullptr || *env == '\0') return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        throw ConfigError("PHS_LAB_SEED must be a decimal unsigned integer, got '" +
                          std::string(env) + "'");
    }
    return static_cast<std::uint64_t>(v);
}

Vec sample_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("sample_box: bounds size mismatch");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
    return x;
}

}  // namespace phslab
