#pragma once

#include "phslab/carnot.hpp"
#include "phslab/constraints.hpp"
#include "phslab/coupling.hpp"
#include "phslab/integrate.hpp"
#include "phslab/storage.hpp"
#include "phslab/system.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace phslab {

/// Shortest text that round-trips the double exactly (17 significant digits).
[[nodiscard]] std::string format_full(double v);

/// Trajectory table with the fixed column layout
///   t,<state labels...>,u_<port labels...>,y_<port labels...>,H,E_port1,E_port2,phase
/// Numbers carry 17 significant digits; E_port2 is 0 for one-port systems.
/// Identical trajectories serialize byte-identically.
void write_trajectory_csv(std::ostream& out, const PhsSystem& sys, const Trajectory& traj,
                          const EnergyLedger& ledger);
void write_trajectory_csv(const std::string& path, const PhsSystem& sys, const Trajectory& traj,
                          const EnergyLedger& ledger);

// JSON reports are flat objects with alphabetically ordered keys; matrices
// appear as nested arrays, nothing deeper.
[[nodiscard]] nlohmann::json to_json(const CycleReport& report);
[[nodiscard]] nlohmann::json to_json(const StructureReport& report);
[[nodiscard]] nlohmann::json to_json(const CyclicSupplyAudit& audit);
[[nodiscard]] nlohmann::json to_json(const DissipationAudit& audit);
[[nodiscard]] nlohmann::json to_json(const QuadraticCertificate& cert);
[[nodiscard]] nlohmann::json to_json(const StorageEstimate& estimate);
[[nodiscard]] nlohmann::json to_json(const MatchingReport& report);

/// Serializes with 2-space indentation and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace phslab
