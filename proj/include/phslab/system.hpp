#pragma once

#include "phslab/numerics.hpp"
#include "phslab/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phslab {

// ============================================================================
// General port-Hamiltonian system
//
//   dx/dt = J(x) e - R(x, e) + G(x) u,   e = dH/dx,   y = G(x)^T e
//
// J skew-symmetric, e^T R(x,e) >= 0. With that sign convention H serves as a
// storage function: dH/dt = y^T u - e^T R(x,e) <= y^T u.
// ============================================================================

/// Callable bundle describing one system. All members are total on the
/// declared domain; evaluation helpers below check shapes and finiteness.
struct PhsSystem {
    int n = 0;  ///< state dimension
    int m = 0;  ///< port dimension

    std::function<double(const Vec&)> hamiltonian;
    /// Analytic co-state map dH/dx; when absent a central-difference
    /// gradient of `hamiltonian` is used.
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> structure;                 ///< J(x), n x n
    std::function<Vec(const Vec&, const Vec&)> dissipation;   ///< R(x,e), n-vector
    std::function<Mat(const Vec&)> input_map;                 ///< G(x), n x m

    std::vector<std::string> state_labels;  ///< size n
    std::vector<std::string> port_labels;   ///< size m (shared by u and y)

    /// Port grouping for energy accounting: sizes of consecutive input
    /// blocks, summing to m. Empty means one block of size m.
    std::vector<int> port_split;

    /// Co-state at x (analytic map when provided, FD otherwise).
    [[nodiscard]] Vec co_state(const Vec& x) const;

    /// Right-hand side J(x)e - R(x,e) + G(x)u. Throws std::invalid_argument
    /// on shape mismatch and NumericalError on non-finite results.
    [[nodiscard]] Vec dynamics(const Vec& x, const Vec& u) const;

    /// Port output y = G(x)^T e.
    [[nodiscard]] Vec output(const Vec& x) const;

    /// Supplied power y^T u at (x, u).
    [[nodiscard]] double port_power(const Vec& x, const Vec& u) const;

    /// Dissipated power e^T R(x, e) at x.
    [[nodiscard]] double dissipated_power(const Vec& x) const;

    /// Indices of the inputs in port group `g` (0-based).
    [[nodiscard]] std::vector<int> port_group(int g) const;

    /// Number of port groups (1 when port_split is empty).
    [[nodiscard]] int port_group_count() const;
};

// ============================================================================
// Two-port subclass
//
//   dx1/dt = J1 e1 - R1 e1 + G1 u1        (G1 constant, invertible)
//   dx2/dt = J2 e2 - R2 e2 + G2(x) u2
//   y1 = G1^T e1,   y2 = G2(x)^T e2
//
// The x1 block of the Hessian of H must stay full rank; operations that
// invert it check a condition estimate against hessian_cond_limit.
// ============================================================================

struct TwoPortPhs {
    int n1 = 0, n2 = 0;  ///< state block dimensions
    int m2 = 0;          ///< port-2 dimension (port 1 has m1 = n1)

    std::function<double(const Vec&, const Vec&)> hamiltonian;  ///< H(x1, x2)
    std::function<Vec(const Vec&, const Vec&)> grad_x1;         ///< optional analytic dH/dx1
    std::function<Vec(const Vec&, const Vec&)> grad_x2;         ///< optional analytic dH/dx2

    std::function<Mat(const Vec&, const Vec&)> j1, j2;  ///< skew blocks
    std::function<Mat(const Vec&, const Vec&)> r1, r2;  ///< PSD dissipation blocks (optional = 0)
    Mat g1;                                             ///< constant invertible n1 x n1
    std::function<Mat(const Vec&, const Vec&)> g2;      ///< n2 x m2

    /// Optional analytic d2H/dx1^2 (n1 x n1) and d2H/(dx1 dx2) (n1 x n2);
    /// central differences of the gradient fill in when absent.
    std::function<Mat(const Vec&, const Vec&)> hessian11;
    std::function<Mat(const Vec&, const Vec&)> hessian12;

    std::vector<std::string> state_labels;  ///< size n1 + n2
    std::vector<std::string> port_labels;   ///< size n1 + m2

    [[nodiscard]] int n() const { return n1 + n2; }
    [[nodiscard]] int m() const { return n1 + m2; }

    [[nodiscard]] Vec e1(const Vec& x1, const Vec& x2) const;
    [[nodiscard]] Vec e2(const Vec& x1, const Vec& x2) const;
    [[nodiscard]] Mat hess11(const Vec& x1, const Vec& x2) const;
    [[nodiscard]] Mat hess12(const Vec& x1, const Vec& x2) const;
    [[nodiscard]] Mat r1_or_zero(const Vec& x1, const Vec& x2) const;
    [[nodiscard]] Mat r2_or_zero(const Vec& x1, const Vec& x2) const;

    /// Splits a stacked state into (x1, x2) views.
    [[nodiscard]] std::pair<Vec, Vec> split_state(const Vec& x) const;

    /// Checks dimensions and that g1 is invertible; throws on violation.
    void validate() const;
};

/// Flattens a two-port system into the general form. The result's port and
/// state partitions are {n1, m2} and {n1, n2}; block dynamics match the
/// two-port equations exactly.
[[nodiscard]] PhsSystem embed_two_port(const TwoPortPhs& sys);

// ============================================================================
// Structure audit
// ============================================================================

/// Sampled verification of the structural contract: J skew-symmetric and
/// e^T R(x,e) >= 0 at every sample.
struct StructureReport {
    double max_skew_defect = 0.0;     ///< max |J + J^T| entry, relative to 1 + |J|
    double min_port_dissipation = 0.0;  ///< min over samples of e^T R(x,e)
    int samples = 0;
    bool skew_ok = false;
    bool dissipation_ok = false;

    [[nodiscard]] bool ok() const { return skew_ok && dissipation_ok; }
};

/// Tolerances: skew defect <= 1e-12 (relative), e^T R >= -1e-12 * (1 + |e|^2).
[[nodiscard]] StructureReport check_structure(const PhsSystem& sys, const std::vector<Vec>& states);

}  // namespace phslab
