#include "phslab/system.hpp"

#include <cmath>
#include <memory>
#include <numeric>

namespace phslab {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

// ----------------------------------------------------------------------------
// PhsSystem
// ----------------------------------------------------------------------------

Vec PhsSystem::co_state(const Vec& x) const {
    require(x.size() == n, "PhsSystem: state size " + std::to_string(x.size()) +
                               " != n = " + std::to_string(n));
    Vec e = gradient ? gradient(x) : fd_gradient(hamiltonian, x);
    if (!all_finite(e)) throw NumericalError("PhsSystem: non-finite co-state");
    return e;
}

Vec PhsSystem::dynamics(const Vec& x, const Vec& u) const {
    require(u.size() == m, "PhsSystem: input size " + std::to_string(u.size()) +
                               " != m = " + std::to_string(m));
    if (!all_finite(x) || !all_finite(u))
        throw NumericalError("PhsSystem: non-finite state or input");
    const Vec e = co_state(x);
    const Mat j = structure(x);
    require(j.rows() == n && j.cols() == n, "PhsSystem: J shape mismatch");
    const Mat g = input_map(x);
    require(g.rows() == n && g.cols() == m, "PhsSystem: G shape mismatch");
    Vec r = dissipation ? dissipation(x, e) : Vec::Zero(n);
    require(r.size() == n, "PhsSystem: R shape mismatch");
    Vec dx = j * e - r + g * u;
    if (!all_finite(dx)) throw NumericalError("PhsSystem: non-finite dynamics");
    return dx;
}

Vec PhsSystem::output(const Vec& x) const {
    const Vec e = co_state(x);
    const Mat g = input_map(x);
    require(g.rows() == n && g.cols() == m, "PhsSystem: G shape mismatch");
    return g.transpose() * e;
}

double PhsSystem::port_power(const Vec& x, const Vec& u) const { return output(x).dot(u); }

double PhsSystem::dissipated_power(const Vec& x) const {
    if (!dissipation) return 0.0;
    const Vec e = co_state(x);
    return e.dot(dissipation(x, e));
}

int PhsSystem::port_group_count() const {
    return port_split.empty() ? 1 : static_cast<int>(port_split.size());
}

std::vector<int> PhsSystem::port_group(int g) const {
    require(g >= 0 && g < port_group_count(), "PhsSystem: port group out of range");
    int begin = 0;
    int size = m;
    if (!port_split.empty()) {
        begin = std::accumulate(port_split.begin(), port_split.begin() + g, 0);
        size = port_split[g];
    }
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), begin);
    return idx;
}

// ----------------------------------------------------------------------------
// TwoPortPhs
// ----------------------------------------------------------------------------

void TwoPortPhs::validate() const {
    require(n1 > 0 && n2 >= 0 && m2 >= 0, "TwoPortPhs: invalid dimensions");
    require(hamiltonian != nullptr, "TwoPortPhs: hamiltonian required");
    require(j1 != nullptr && j2 != nullptr, "TwoPortPhs: structure blocks required");
    require(g2 != nullptr || m2 == 0, "TwoPortPhs: g2 required when m2 > 0");
    require(g1.rows() == n1 && g1.cols() == n1, "TwoPortPhs: g1 must be n1 x n1");
    if (!(condition_estimate(g1) < hessian_cond_limit))
        throw std::invalid_argument("TwoPortPhs: g1 must be invertible");
}

std::pair<Vec, Vec> TwoPortPhs::split_state(const Vec& x) const {
    require(x.size() == n(), "TwoPortPhs: stacked state size mismatch");
    return {x.head(n1), x.tail(n2)};
}

Vec TwoPortPhs::e1(const Vec& x1, const Vec& x2) const {
    if (grad_x1) return grad_x1(x1, x2);
    const Vec g = fd_gradient([&](const Vec& v1) { return hamiltonian(v1, x2); }, x1);
    return g;
}

Vec TwoPortPhs::e2(const Vec& x1, const Vec& x2) const {
    if (grad_x2) return grad_x2(x1, x2);
    return fd_gradient([&](const Vec& v2) { return hamiltonian(x1, v2); }, x2);
}

Mat TwoPortPhs::hess11(const Vec& x1, const Vec& x2) const {
    if (hessian11) return hessian11(x1, x2);
    return fd_hessian([&](const Vec& v1) { return e1(v1, x2); }, x1);
}

Mat TwoPortPhs::hess12(const Vec& x1, const Vec& x2) const {
    if (hessian12) return hessian12(x1, x2);
    // Jacobian of e1 with respect to x2 (no symmetrization: block is rectangular).
    return fd_jacobian([&](const Vec& v2) { return e1(x1, v2); }, x2);
}

Mat TwoPortPhs::r1_or_zero(const Vec& x1, const Vec& x2) const {
    return r1 ? r1(x1, x2) : Mat::Zero(n1, n1);
}

Mat TwoPortPhs::r2_or_zero(const Vec& x1, const Vec& x2) const {
    return r2 ? r2(x1, x2) : Mat::Zero(n2, n2);
}

// ----------------------------------------------------------------------------
// Embedding
// ----------------------------------------------------------------------------

PhsSystem embed_two_port(const TwoPortPhs& sys) {
    sys.validate();
    // Shared ownership keeps the callables alive in every closure below.
    auto s = std::make_shared<const TwoPortPhs>(sys);
    const int n1 = s->n1, n2 = s->n2, m2 = s->m2;
    const int n = s->n(), m = s->m();

    PhsSystem out;
    out.n = n;
    out.m = m;
    out.state_labels = s->state_labels;
    out.port_labels = s->port_labels;
    out.port_split = {n1, m2};

    out.hamiltonian = [s](const Vec& x) {
        auto [x1, x2] = s->split_state(x);
        return s->hamiltonian(x1, x2);
    };
    out.gradient = [s, n](const Vec& x) {
        auto [x1, x2] = s->split_state(x);
        Vec e(n);
        e.head(s->n1) = s->e1(x1, x2);
        e.tail(s->n2) = s->e2(x1, x2);
        return e;
    };
    out.structure = [s, n, n1, n2](const Vec& x) {
        auto [x1, x2] = s->split_state(x);
        Mat j = Mat::Zero(n, n);
        j.topLeftCorner(n1, n1) = s->j1(x1, x2);
        j.bottomRightCorner(n2, n2) = s->j2(x1, x2);
        return j;
    };
    out.dissipation = [s, n, n1, n2](const Vec& x, const Vec& e) {
        auto [x1, x2] = s->split_state(x);
        Vec r = Vec::Zero(n);
        if (s->r1) r.head(n1) = s->r1(x1, x2) * e.head(n1);
        if (s->r2) r.tail(n2) = s->r2(x1, x2) * e.tail(n2);
        return r;
    };
    out.input_map = [s, n, m, n1, n2, m2](const Vec& x) {
        auto [x1, x2] = s->split_state(x);
        Mat g = Mat::Zero(n, m);
        g.topLeftCorner(n1, n1) = s->g1;
        if (m2 > 0) g.bottomRightCorner(n2, m2) = s->g2(x1, x2);
        return g;
    };
    return out;
}

// ----------------------------------------------------------------------------
// Structure audit
// ----------------------------------------------------------------------------

StructureReport check_structure(const PhsSystem& sys, const std::vector<Vec>& states) {
    StructureReport rep;
    rep.samples = static_cast<int>(states.size());
    rep.min_port_dissipation = std::numeric_limits<double>::infinity();
    bool skew_ok = true;
    bool diss_ok = true;
    for (const Vec& x : states) {
        const Mat j = sys.structure(x);
        const double scale = 1.0 + j.cwiseAbs().maxCoeff();
        const double defect = (j + j.transpose()).cwiseAbs().maxCoeff() / scale;
        rep.max_skew_defect = std::max(rep.max_skew_defect, defect);
        if (defect > 1e-12) skew_ok = false;

        const Vec e = sys.co_state(x);
        const double p = sys.dissipated_power(x);
        rep.min_port_dissipation = std::min(rep.min_port_dissipation, p);
        if (p < -1e-12 * (1.0 + e.squaredNorm())) diss_ok = false;
    }
    if (states.empty()) rep.min_port_dissipation = 0.0;
    rep.skew_ok = skew_ok;
    rep.dissipation_ok = diss_ok;
    return rep;
}

}  // namespace phslab
