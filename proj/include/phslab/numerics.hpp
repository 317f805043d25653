#pragma once

#include "phslab/types.hpp"

#include <functional>
#include <random>

namespace phslab {

// ============================================================================
// Finite differences
// ============================================================================

/// Per-coordinate central-difference step: h_i = fd_scale * max(1, |x_i|).
inline constexpr double fd_scale = 1e-6;

/// Central-difference gradient of a scalar field.
[[nodiscard]] Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x);

/// Central-difference Jacobian of a vector field (rows follow f's output).
[[nodiscard]] Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x);

/// Hessian of a scalar field via central differences of `grad`.
/// Symmetrized as (M + M^T)/2 since FD cross terms differ in rounding only.
[[nodiscard]] Mat fd_hessian(const std::function<Vec(const Vec&)>& grad, const Vec& x);

// ============================================================================
// Small dense helpers
// ============================================================================

/// Infinity-norm condition estimate ||A||_inf * ||A^-1||_inf from an explicit
/// inverse. Returns +inf when A is singular to working precision.
[[nodiscard]] double condition_estimate(const Mat& a);

/// Solves A z = b for small dense A; throws NumericalError when the
/// condition estimate exceeds `cond_limit`.
[[nodiscard]] Vec solve_checked(const Mat& a, const Vec& b, double cond_limit,
                                const std::string& context);

/// Condition threshold above which partial Hessians are treated as singular.
inline constexpr double hessian_cond_limit = 1e12;

/// True when every entry of v is finite.
[[nodiscard]] bool all_finite(const Vec& v);

// ============================================================================
// Smooth motion profiles
// ============================================================================

/// C^2 ramp on [0,1]: value 6s^5 - 15s^4 + 10s^3, with first and second
/// derivatives zero at both ends. Arguments outside [0,1] clamp.
struct SmoothRamp {
    [[nodiscard]] static double value(double s);
    [[nodiscard]] static double d1(double s);  ///< d/ds
    [[nodiscard]] static double d2(double s);  ///< d^2/ds^2
    [[nodiscard]] static double d3(double s);  ///< d^3/ds^3
};

/// Scalar reference path r(t) moving from `from` to `to` over [t0, t0+tau]
/// with zero velocity and acceleration at both ends; constant outside.
struct SmoothMove {
    double from = 0.0;
    double to = 0.0;
    double t0 = 0.0;
    double tau = 1.0;

    [[nodiscard]] double pos(double t) const;
    [[nodiscard]] double vel(double t) const;
    [[nodiscard]] double acc(double t) const;
};

// ============================================================================
// Randomness for property sampling
// ============================================================================

/// Seed for randomized property sampling. Reads the decimal unsigned integer
/// in PHS_LAB_SEED when set, otherwise returns `fallback`. Malformed values
/// raise ConfigError.
[[nodiscard]] std::uint64_t sampling_seed(std::uint64_t fallback = 20260817ull);

/// Uniform sample in the box [lo, hi] (componentwise).
[[nodiscard]] Vec sample_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi);

}  // namespace phslab
