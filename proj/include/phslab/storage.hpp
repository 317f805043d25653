#pragma once

#include "phslab/integrate.hpp"
#include "phslab/models.hpp"
#include "phslab/system.hpp"

namespace phslab {

// ============================================================================
// Dissipation-inequality audit
//
// A storage candidate S must satisfy S(x(t2)) <= S(x(t1)) + int_t1^t2 y^T u
// for every t1 <= t2 along every trajectory. The audit reports the worst
// violation over all grid pairs, computed in O(N) from the running minimum
// of S - W with W the cumulative supplied energy.
// ============================================================================

struct DissipationAudit {
    double worst_violation = 0.0;  ///< max over pairs of S(t2) - S(t1) - supplied(t1, t2)
    std::size_t t1_index = 0;      ///< pair achieving the worst violation
    std::size_t t2_index = 0;
    double tolerance = 0.0;
    bool passed = false;  ///< worst_violation <= tolerance
};

[[nodiscard]] DissipationAudit dissipation_audit(const PhsSystem& sys, const Trajectory& traj,
                                                 const std::function<double(const Vec&)>& storage,
                                                 double tolerance);

// ============================================================================
// Quadratic storage for the mass-spring-damper
//
// Linear dynamics A = [[0, 1/m], [-k, -d/m]], input b = (0, 1), output
// y = p/m. The constraints Q b = c (supply-rate matching) and
// A^T Q + Q A <= 0 pin the certificate to the unique Q = diag(k, 1/m),
// which reproduces the Hamiltonian: x^T Q x / 2 = H(x).
// ============================================================================

struct QuadraticCertificate {
    Mat q;                   ///< storage is x^T q x / 2
    bool unique = false;     ///< constraint resolution left no freedom
    Mat lyapunov_residual;   ///< A^T Q + Q A
    bool semidefinite_ok = false;  ///< -(A^T Q + Q A) PSD by trace/determinant signs
};

[[nodiscard]] QuadraticCertificate msd_storage_certificate(const MsdParams& p);

/// Storage evaluator x -> x^T q x / 2 for a certificate matrix.
[[nodiscard]] std::function<double(const Vec&)> quadratic_storage(Mat q);

// ============================================================================
// Closed-form storage values for the scalar exponential system
// ============================================================================

struct ScalarStorageValues {
    double s_a = 0.0;   ///< storage exp(x); positive everywhere, no finite minimum
    double s_ac = 0.0;  ///< max energy extractable while steering x -> x_star
    double s_rc = 0.0;  ///< min energy required to reach x from x_star
};

/// For dx/dt = u, y = exp(x): s_a = exp(x) and s_ac = s_rc = exp(x) - exp(x_star).
[[nodiscard]] ScalarStorageValues scalar_exp_storage(double x, double x_star = 0.0);

// ============================================================================
// Sampled two-sided storage bounds
//
// Lower bound on extractable energy: best -supplied over trial inputs that
// steer x to x_star. Upper bound on required supply: least supplied over
// trials that steer x_star to x. Trials whose endpoint misses the target
// beyond the closure tolerance are discarded. For any storage S with
// S(x_star) = 0 the bracket extractable_lower <= S(x) <= reachability_upper
// holds up to quadrature error.
// ============================================================================

struct StorageTrial {
    std::string name;
    InputLaw law;
    double duration = 1.0;
    double step = 1e-4;
};

struct TrialFamily {
    std::vector<StorageTrial> to_ground;    ///< steer x -> x_star
    std::vector<StorageTrial> from_ground;  ///< steer x_star -> x
};

struct TrialOutcome {
    std::string name;
    bool valid = false;
    double supplied = 0.0;
    double endpoint_error = 0.0;
};

struct StorageEstimate {
    bool valid = false;  ///< both sides have at least one valid trial
    double extractable_lower = 0.0;
    double reachability_upper = 0.0;
    std::vector<TrialOutcome> to_ground;
    std::vector<TrialOutcome> from_ground;
};

[[nodiscard]] StorageEstimate sampled_storage_bounds(const PhsSystem& sys, const Vec& x,
                                                     const Vec& x_star, const TrialFamily& family);

/// Time-scaled ramps between x and x_star for the scalar exponential system;
/// one trial per slowness factor in {1, 2, 4, 8, 16}.
[[nodiscard]] TrialFamily scalar_exp_trials(double x, double x_star);

/// Inverse-dynamics transfers for the mass-spring-damper: smooth position
/// paths honoring the endpoint velocities, driven open loop; slowness
/// factors {1, 2, 4, 8, 16}.
[[nodiscard]] TrialFamily msd_storage_trials(const MsdParams& p, const Vec& x, const Vec& x_star);

}  // namespace phslab
