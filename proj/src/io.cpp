#include "phslab/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace phslab {

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

nlohmann::json matrix_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const PhsSystem& sys, const Trajectory& traj,
                          const EnergyLedger& ledger) {
    out << "t";
    for (const std::string& l : sys.state_labels) out << "," << l;
    for (const std::string& l : sys.port_labels) out << ",u_" << l;
    for (const std::string& l : sys.port_labels) out << ",y_" << l;
    out << ",H,E_port1,E_port2,phase\n";

    const bool two_ports = ledger.port_supplied.size() >= 2;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_full(traj.times[i]);
        for (int k = 0; k < sys.n; ++k) out << "," << format_full(traj.states[i][k]);
        for (int k = 0; k < sys.m; ++k) out << "," << format_full(traj.inputs[i][k]);
        for (int k = 0; k < sys.m; ++k) out << "," << format_full(traj.outputs[i][k]);
        out << "," << format_full(traj.energies[i]);
        out << "," << format_full(ledger.port_supplied[0][i]);
        out << "," << format_full(two_ports ? ledger.port_supplied[1][i] : 0.0);
        out << "," << traj.phase_at(i) << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const PhsSystem& sys, const Trajectory& traj,
                          const EnergyLedger& ledger) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    write_trajectory_csv(out, sys, traj, ledger);
}

nlohmann::json to_json(const CycleReport& r) {
    return {{"closure_error", r.closure_error},
            {"delta_x1_cold", r.delta_x1_cold},
            {"delta_x1_hot", r.delta_x1_hot},
            {"efficiency_ideal", r.efficiency_ideal},
            {"efficiency_measured", r.efficiency_measured},
            {"heat_cold", r.heat_cold},
            {"heat_hot", r.heat_hot},
            {"inequality_slack", r.inequality_slack},
            {"max_tracking_error", r.max_tracking_error},
            {"stirling_residual", r.stirling_residual},
            {"work_out", r.work_out}};
}

nlohmann::json to_json(const StructureReport& r) {
    return {{"dissipation_ok", r.dissipation_ok},
            {"max_skew_defect", r.max_skew_defect},
            {"min_port_dissipation", r.min_port_dissipation},
            {"samples", r.samples},
            {"skew_ok", r.skew_ok}};
}

nlohmann::json to_json(const CyclicSupplyAudit& a) {
    return {{"applicable", a.applicable},
            {"closure_error", a.closure_error},
            {"costate_variation", a.costate_variation},
            {"port1_ok", a.port1_ok},
            {"port1_supplied", a.port1_supplied},
            {"port2_ok", a.port2_ok},
            {"port2_supplied", a.port2_supplied},
            {"reason", a.reason},
            {"tolerance", a.tolerance}};
}

nlohmann::json to_json(const DissipationAudit& a) {
    return {{"passed", a.passed},
            {"t1_index", a.t1_index},
            {"t2_index", a.t2_index},
            {"tolerance", a.tolerance},
            {"worst_violation", a.worst_violation}};
}

nlohmann::json to_json(const QuadraticCertificate& c) {
    return {{"Q", matrix_json(c.q)},
            {"lyapunov_residual", matrix_json(c.lyapunov_residual)},
            {"semidefinite_ok", c.semidefinite_ok},
            {"unique", c.unique}};
}

nlohmann::json to_json(const StorageEstimate& e) {
    int valid_to = 0, valid_from = 0;
    for (const TrialOutcome& t : e.to_ground) valid_to += t.valid ? 1 : 0;
    for (const TrialOutcome& t : e.from_ground) valid_from += t.valid ? 1 : 0;
    return {{"extractable_lower", e.extractable_lower},
            {"reachability_upper", e.reachability_upper},
            {"trials_from_ground", e.from_ground.size()},
            {"trials_to_ground", e.to_ground.size()},
            {"valid", e.valid},
            {"valid_from_ground", valid_from},
            {"valid_to_ground", valid_to}};
}

nlohmann::json to_json(const MatchingReport& r) {
    return {{"max_closed_loop_defect", r.max_closed_loop_defect},
            {"max_direct_feedback_defect", r.max_direct_feedback_defect},
            {"max_matching_residual", r.max_matching_residual},
            {"samples", r.samples}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace phslab
