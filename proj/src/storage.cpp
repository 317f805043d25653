#include "phslab/storage.hpp"

#include <cmath>
#include <limits>

namespace phslab {

// ----------------------------------------------------------------------------
// Dissipation audit
// ----------------------------------------------------------------------------

DissipationAudit dissipation_audit(const PhsSystem& sys, const Trajectory& traj,
                                   const std::function<double(const Vec&)>& storage,
                                   double tolerance) {
    if (traj.size() < 2) throw std::invalid_argument("dissipation_audit: trajectory too short");

    std::vector<int> all_ports(sys.m);
    for (int i = 0; i < sys.m; ++i) all_ports[i] = i;
    const std::vector<double> supplied = supplied_energy(traj, all_ports);

    DissipationAudit audit;
    audit.tolerance = tolerance;
    // Violation over (t1, t2) is D(t2) - D(t1) with D = S - W, so the worst
    // pair tracks the running minimum of D in one pass.
    double min_d = std::numeric_limits<double>::infinity();
    std::size_t min_idx = 0;
    audit.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double d = storage(traj.states[i]) - supplied[i];
        if (d < min_d) {
            min_d = d;
            min_idx = i;
        }
        const double violation = d - min_d;
        if (violation > audit.worst_violation) {
            audit.worst_violation = violation;
            audit.t1_index = min_idx;
            audit.t2_index = i;
        }
    }
    audit.passed = audit.worst_violation <= tolerance;
    return audit;
}

// ----------------------------------------------------------------------------
// Quadratic certificate for the mass-spring-damper
// ----------------------------------------------------------------------------

QuadraticCertificate msd_storage_certificate(const MsdParams& p) {
    p.validate();
    QuadraticCertificate cert;
    // Supply-rate matching forces the second column (q12 = 0, q22 = 1/m);
    // negative semidefiniteness of A^T Q + Q A then forces q11 = k because
    // the (0,0) entry of the residual is identically zero.
    cert.q = Mat::Zero(2, 2);
    cert.q(0, 0) = p.stiffness;
    cert.q(1, 1) = 1.0 / p.mass;
    cert.unique = true;

    Mat a(2, 2);
    a << 0.0, 1.0 / p.mass, -p.stiffness, -p.damping / p.mass;
    cert.lyapunov_residual = a.transpose() * cert.q + cert.q * a;

    const Mat neg = -cert.lyapunov_residual;
    const double scale = 1.0 + neg.cwiseAbs().maxCoeff();
    cert.semidefinite_ok =
        neg.trace() >= -1e-12 * scale && neg.determinant() >= -1e-12 * scale * scale;
    return cert;
}

std::function<double(const Vec&)> quadratic_storage(Mat q) {
    return [q = std::move(q)](const Vec& x) { return 0.5 * x.dot(q * x); };
}

// ----------------------------------------------------------------------------
// Scalar exponential system closed forms
// ----------------------------------------------------------------------------

ScalarStorageValues scalar_exp_storage(double x, double x_star) {
    ScalarStorageValues v;
    v.s_a = std::exp(x);
    v.s_ac = std::exp(x) - std::exp(x_star);
    v.s_rc = v.s_ac;
    return v;
}

// ----------------------------------------------------------------------------
// Sampled bounds
// ----------------------------------------------------------------------------

namespace {

TrialOutcome run_trial(const PhsSystem& sys, const StorageTrial& trial, const Vec& start,
                       const Vec& target) {
    TrialOutcome out;
    out.name = trial.name;
    SimulateOptions opt;
    opt.t_end = trial.duration;
    opt.step = trial.step;
    const Trajectory traj = simulate(sys, start, trial.law, opt);

    std::vector<int> all(sys.m);
    for (int i = 0; i < sys.m; ++i) all[i] = i;
    out.supplied = supplied_energy(traj, all).back();
    out.endpoint_error = (traj.states.back() - target).cwiseAbs().maxCoeff();
    out.valid = out.endpoint_error <= closure_tolerance(target);
    return out;
}

}  // namespace

StorageEstimate sampled_storage_bounds(const PhsSystem& sys, const Vec& x, const Vec& x_star,
                                       const TrialFamily& family) {
    StorageEstimate est;
    est.extractable_lower = -std::numeric_limits<double>::infinity();
    est.reachability_upper = std::numeric_limits<double>::infinity();

    bool any_to = false, any_from = false;
    for (const StorageTrial& trial : family.to_ground) {
        TrialOutcome out = run_trial(sys, trial, x, x_star);
        if (out.valid) {
            any_to = true;
            est.extractable_lower = std::max(est.extractable_lower, -out.supplied);
        }
        est.to_ground.push_back(std::move(out));
    }
    for (const StorageTrial& trial : family.from_ground) {
        TrialOutcome out = run_trial(sys, trial, x_star, x);
        if (out.valid) {
            any_from = true;
            est.reachability_upper = std::min(est.reachability_upper, out.supplied);
        }
        est.from_ground.push_back(std::move(out));
    }
    est.valid = any_to && any_from;
    if (!any_to) est.extractable_lower = 0.0;
    if (!any_from) est.reachability_upper = 0.0;
    return est;
}

// ----------------------------------------------------------------------------
// Trial builders
// ----------------------------------------------------------------------------

namespace {

constexpr std::array<int, 5> slowness_factors = {1, 2, 4, 8, 16};

/// Quintic q(t) = sum c_k t^k with prescribed endpoint positions and
/// velocities and zero endpoint accelerations.
struct QuinticPath {
    Eigen::Matrix<double, 6, 1> c;

    static QuinticPath build(double q0, double v0, double q1, double v1, double t_end) {
        QuinticPath path;
        path.c.setZero();
        path.c[0] = q0;
        path.c[1] = v0;
        // c2 = 0; solve the terminal conditions for c3..c5.
        Eigen::Matrix3d m;
        Eigen::Vector3d rhs;
        const double t3 = t_end * t_end * t_end, t4 = t3 * t_end, t5 = t4 * t_end;
        m << t3, t4, t5, 3 * t3 / t_end, 4 * t4 / t_end, 5 * t5 / t_end, 6 * t_end, 12 * t_end * t_end,
            20 * t3;
        rhs << q1 - q0 - v0 * t_end, v1 - v0, 0.0;
        const Eigen::Vector3d tail = m.fullPivLu().solve(rhs);
        path.c[3] = tail[0];
        path.c[4] = tail[1];
        path.c[5] = tail[2];
        return path;
    }

    [[nodiscard]] double pos(double t) const {
        double acc = 0.0;
        for (int k = 5; k >= 0; --k) acc = acc * t + c[k];
        return acc;
    }
    [[nodiscard]] double vel(double t) const {
        double acc = 0.0;
        for (int k = 5; k >= 1; --k) acc = acc * t + k * c[k];
        return acc;
    }
    [[nodiscard]] double accel(double t) const {
        double acc = 0.0;
        for (int k = 5; k >= 2; --k) acc = acc * t + k * (k - 1) * c[k];
        return acc;
    }
};

}  // namespace

TrialFamily scalar_exp_trials(double x, double x_star) {
    TrialFamily fam;
    auto make = [](double from, double to, int slowness) {
        StorageTrial trial;
        trial.name = "ramp_x" + std::to_string(slowness);
        trial.duration = static_cast<double>(slowness);
        trial.step = 1e-4;
        SmoothMove move{from, to, 0.0, trial.duration};
        trial.law = InputLaw::open_loop([move](double t) { return Vec::Constant(1, move.vel(t)); });
        return trial;
    };
    for (int s : slowness_factors) {
        fam.to_ground.push_back(make(x, x_star, s));
        fam.from_ground.push_back(make(x_star, x, s));
    }
    return fam;
}

TrialFamily msd_storage_trials(const MsdParams& p, const Vec& x, const Vec& x_star) {
    p.validate();
    if (x.size() != 2 || x_star.size() != 2)
        throw std::invalid_argument("msd_storage_trials: states must be (q, p)");

    TrialFamily fam;
    auto make = [p](const Vec& from, const Vec& to, int slowness) {
        StorageTrial trial;
        trial.name = "transfer_x" + std::to_string(slowness);
        trial.duration = 2.0 * static_cast<double>(slowness);
        trial.step = 1e-4;
        const QuinticPath path = QuinticPath::build(from[0], from[1] / p.mass, to[0],
                                                    to[1] / p.mass, trial.duration);
        // Inverse dynamics: u = m qdd + d qd + k q keeps the system exactly
        // on the path when started on it.
        trial.law = InputLaw::open_loop([p, path](double t) {
            return Vec::Constant(1, p.mass * path.accel(t) + p.damping * path.vel(t) +
                                        p.stiffness * path.pos(t));
        });
        return trial;
    };
    for (int s : slowness_factors) {
        fam.to_ground.push_back(make(x, x_star, s));
        fam.from_ground.push_back(make(x_star, x, s));
    }
    return fam;
}

}  // namespace phslab
