#pragma once

#include "phslab/system.hpp"

namespace phslab {

/// Componentwise box, used to describe the recommended sampling region of a
/// model's state space (audits, property tests, randomized scenarios).
struct StateBox {
    Vec lo, hi;
};

/// Molar gas constant (J/(mol K)) shared by the thermodynamic models.
inline constexpr double gas_constant = 8.314;

// ============================================================================
// Gas-piston chamber
//
// States (S, V, pi): gas entropy (J/K), chamber volume (m^3) and piston
// momentum (kg m/s). Port 1 injects entropy flow (co-state: temperature T),
// port 2 applies force on the piston (co-state: velocity). Internal energy
// follows the calorically perfect ideal gas:
//
//   U(S, V) = n c_v T0 exp((S - S0)/(n c_v)) (V / V0)^(-R/c_v)
//
// so that T = dU/dS, P = -dU/dV = n R T / V, and adiabats satisfy
// T V^(R/c_v) = const.
// ============================================================================

struct GasPistonParams {
    double n_mol = 1.0;                  ///< amount of gas (mol)
    double c_v = 1.5 * gas_constant;     ///< molar heat capacity, const volume (J/(mol K))
    double t_ref = 300.0;                ///< temperature at the reference state (K)
    double v_ref = 1e-3;                 ///< volume at the reference state (m^3)
    double s_ref = 0.0;                  ///< entropy at the reference state (J/K)
    double piston_area = 1e-2;           ///< piston cross-section (m^2)
    double piston_mass = 1.0;            ///< piston mass (kg)
    double piston_friction = 0.0;        ///< viscous drag on the piston (N s/m), >= 0

    void validate() const;
};

[[nodiscard]] TwoPortPhs make_gas_piston(const GasPistonParams& p = {});
[[nodiscard]] StateBox gas_piston_domain(const GasPistonParams& p = {});

/// Gas temperature at (S, V); requires V > 0.
[[nodiscard]] double gas_piston_temperature(const GasPistonParams& p, double s, double v);

/// Entropy S with T(S, V) = t; inverse of gas_piston_temperature in S.
[[nodiscard]] double gas_piston_entropy(const GasPistonParams& p, double t, double v);

/// Volume reached from (t_start, v_start) along the adiabat when the
/// temperature arrives at t_target: v t^(c_v/R) invariant.
[[nodiscard]] double gas_piston_adiabat_volume(const GasPistonParams& p, double t_start,
                                               double v_start, double t_target);

// ============================================================================
// Electromagnetic plunger actuator
//
// States (phi, q, p): coil flux linkage (Wb), armature position (m) and
// armature momentum (kg m/s). Port 1 is the coil voltage (co-state: current
// I = phi / L(q)), port 2 a force on the armature. Position-dependent
// inductance L(q) = L0 a / (a + q); domain q > -a.
// ============================================================================

struct ActuatorParams {
    double l0 = 1.0;    ///< inductance at q = 0 (H)
    double gap = 0.05;  ///< inductance length scale a (m)
    double mass = 1.0;  ///< armature mass (kg)

    void validate() const;
};

[[nodiscard]] TwoPortPhs make_actuator(const ActuatorParams& p = {});
[[nodiscard]] StateBox actuator_domain(const ActuatorParams& p = {});

[[nodiscard]] double actuator_inductance(const ActuatorParams& p, double q);
[[nodiscard]] double actuator_inductance_slope(const ActuatorParams& p, double q);

/// Position with L(q) = l; inverse of actuator_inductance.
[[nodiscard]] double actuator_position_for_inductance(const ActuatorParams& p, double l);

// ============================================================================
// Two-body heat exchanger
//
// States (S1, S2): entropies of two heat capacitors with E_i(S_i) =
// C_i T_ref exp(S_i / C_i), so T_i = T_ref exp(S_i / C_i) > 0. The internal
// Fourier-type exchange sits in the skew structure matrix; both entropy
// ports are exposed (G = I).
// ============================================================================

struct HeatExchangerParams {
    double c1 = 10.0;       ///< heat capacity of body 1 (J/K)
    double c2 = 10.0;       ///< heat capacity of body 2 (J/K)
    double t_ref = 300.0;   ///< reference temperature (K)
    double conductance = 1.0;  ///< exchange coefficient lambda (W/K)

    void validate() const;
};

[[nodiscard]] PhsSystem make_heat_exchanger(const HeatExchangerParams& p = {});
[[nodiscard]] StateBox heat_exchanger_domain(const HeatExchangerParams& p = {});

/// Entropy of body `body` (1 or 2) at temperature t.
[[nodiscard]] double heat_exchanger_entropy(const HeatExchangerParams& p, int body, double t);

// ============================================================================
// Mass-spring-damper
//
// States (q, p); H = k q^2 / 2 + p^2 / (2 m); input force, output velocity.
// ============================================================================

struct MsdParams {
    double mass = 1.0;       ///< (kg)
    double stiffness = 1.0;  ///< (N/m)
    double damping = 0.0;    ///< (N s/m), >= 0

    void validate() const;
};

[[nodiscard]] PhsSystem make_msd(const MsdParams& p = {});
[[nodiscard]] StateBox msd_domain(const MsdParams& p = {});

// ============================================================================
// Scalar exponential-storage system
//
// dx/dt = u, y = exp(x). Cyclo-passive with storage exp(x) but not passive:
// the storage has no finite minimum over the real line.
// ============================================================================

[[nodiscard]] PhsSystem make_scalar_exp();
[[nodiscard]] StateBox scalar_exp_domain();

}  // namespace phslab
