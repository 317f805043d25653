#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

// ============================================================================
// End-to-end checks against the built binary. Each invocation runs through
// the shell in a scratch directory so relative [output] paths land there;
// stdout and stderr are captured into files and read back.
// ============================================================================

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string cli = PHSLAB_CLI_PATH;
const fs::path config_dir = PHSLAB_CONFIG_DIR;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

[[nodiscard]] std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Fresh scratch directory per scenario name, wiped if a previous run left one.
[[nodiscard]] fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("phslab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Runs `<cli> <args>` with `dir` as working directory and captures the
/// outcome. `env` is prepended verbatim (e.g. "PHS_LAB_SEED=1").
[[nodiscard]] RunResult run_cli(const fs::path& dir, const std::string& args,
                                const std::string& env = "") {
    const fs::path out_file = dir / ".stdout";
    const fs::path err_file = dir / ".stderr";
    const std::string command = "cd '" + dir.string() + "' && " + (env.empty() ? "" : env + " ") +
                                "'" + cli + "' " + args + " > '" + out_file.string() + "' 2> '" +
                                err_file.string() + "'";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

// ----------------------------------------------------------------------------
// Frozen certificate output
// ----------------------------------------------------------------------------

TEST_CASE("the certificate subcommand prints the pinned matrix") {
    const fs::path dir = scratch_dir("lmi");
    const RunResult run = run_cli(dir, "storage-lmi --m 2 --k 3 --d 1");
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.out);
    REQUIRE(report.contains("Q"));
    CHECK(report["Q"][0][0].get<double>() == 3.0);
    CHECK(report["Q"][0][1].get<double>() == 0.0);
    CHECK(report["Q"][1][0].get<double>() == 0.0);
    CHECK(report["Q"][1][1].get<double>() == 0.5);
    CHECK(report["unique"].get<bool>());
}

// ----------------------------------------------------------------------------
// Shipped scenarios
// ----------------------------------------------------------------------------

TEST_CASE("every shipped scenario runs clean and writes its report") {
    const std::vector<std::pair<std::string, std::string>> scenarios = {
        {"carnot", "gas_piston_carnot"},
        {"carnot", "actuator_carnot"},
        {"storage-lmi", "msd_storage_lmi"},
        {"audit", "msd_dissipation_audit"},
        {"audit", "gas_cyclic_supply"},
        {"audit", "actuator_cyclic_supply"},
        {"storage-bounds", "scalar_storage_bounds"},
        {"audit", "gas_legendre_audit"},
        {"audit", "actuator_legendre_audit"},
        {"router", "router"},
        {"ida-pbc", "ida_pbc"},
        {"simulate", "heat_exchanger_sim"},
        {"audit", "integrator_order_audit"},
        {"audit", "gas_structure_audit"},
    };
    const fs::path dir = scratch_dir("shipped");
    for (const auto& [subcommand, name] : scenarios) {
        CAPTURE(name);
        const fs::path config = config_dir / (name + ".cfg");
        REQUIRE(fs::exists(config));
        const RunResult run = run_cli(dir, subcommand + " --config '" + config.string() + "'");
        CHECK_MESSAGE(run.exit_code == 0, run.err);
        const fs::path report_path = dir / (name + ".json");
        REQUIRE(fs::exists(report_path));
        const json parsed = json::parse(slurp(report_path));
        CHECK(!parsed.empty());
    }
}

TEST_CASE("the scenario reports carry the headline physics") {
    const fs::path dir = scratch_dir("headline");

    const RunResult carnot = run_cli(
        dir, "carnot --config '" + (config_dir / "gas_piston_carnot.cfg").string() + "' --out c.json");
    REQUIRE(carnot.exit_code == 0);
    const json cycle = json::parse(slurp(dir / "c.json"));
    CHECK(cycle["efficiency_measured"].get<double>() == doctest::Approx(0.25).epsilon(0.04));
    CHECK(cycle["heat_hot"].get<double>() == doctest::Approx(2305.13).epsilon(0.005));
    CHECK(cycle["work_out"].get<double>() == doctest::Approx(576.28).epsilon(0.01));

    const RunResult bounds = run_cli(
        dir, "storage-bounds --config '" + (config_dir / "scalar_storage_bounds.cfg").string() +
                 "' --out b.json");
    REQUIRE(bounds.exit_code == 0);
    const json estimate = json::parse(slurp(dir / "b.json"));
    const double truth = std::exp(1.0) - 1.0;
    CHECK(estimate["extractable_lower"].get<double>() == doctest::Approx(truth).epsilon(1e-5));
    CHECK(estimate["reachability_upper"].get<double>() == doctest::Approx(truth).epsilon(1e-5));

    const RunResult router = run_cli(
        dir, "router --config '" + (config_dir / "router.cfg").string() + "' --out r.json");
    REQUIRE(router.exit_code == 0);
    const json routed = json::parse(slurp(dir / "r.json"));
    CHECK(routed["h_receiver_end"].get<double>() >
          0.5 * routed["h_donor_start"].get<double>());
    CHECK(routed["t_half"].get<double>() > 0.0);
}

// ----------------------------------------------------------------------------
// Determinism
// ----------------------------------------------------------------------------

TEST_CASE("identical invocations produce identical bytes") {
    const fs::path dir = scratch_dir("determinism");
    write_file(dir / "sim.cfg",
               "[model]\nkind = msd\ndamping = 0.3\n"
               "[run]\nx0 = 1 0\nt_end = 2.0\nstep = 1e-3\n"
               "[input]\nkind = sine\namplitude = 0.5\nomega = 2.0\n");
    const RunResult first = run_cli(dir, "simulate --config sim.cfg --out a.json --csv a.csv");
    const RunResult second = run_cli(dir, "simulate --config sim.cfg --out b.json --csv b.csv");
    REQUIRE(first.exit_code == 0);
    REQUIRE(second.exit_code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(!slurp(dir / "a.csv").empty());
}

TEST_CASE("parallel scenario batches match sequential outputs") {
    const std::string structure = (config_dir / "gas_structure_audit.cfg").string();
    const std::string legendre = (config_dir / "gas_legendre_audit.cfg").string();

    const fs::path seq = scratch_dir("batch_seq");
    REQUIRE(run_cli(seq, "audit --config '" + structure + "'").exit_code == 0);
    REQUIRE(run_cli(seq, "audit --config '" + legendre + "'").exit_code == 0);

    const fs::path par = scratch_dir("batch_par");
    const RunResult batch = run_cli(
        par, "audit --config '" + structure + "' --config '" + legendre + "' --jobs 2");
    REQUIRE(batch.exit_code == 0);

    for (const char* name : {"gas_structure_audit.json", "gas_legendre_audit.json"}) {
        CAPTURE(name);
        CHECK(slurp(seq / name) == slurp(par / name));
        CHECK(!slurp(par / name).empty());
    }
}

TEST_CASE("the sampling seed reaches the audits and reproduces itself") {
    const std::string config = (config_dir / "gas_legendre_audit.cfg").string();
    const fs::path dir = scratch_dir("seed");
    REQUIRE(run_cli(dir, "audit --config '" + config + "' --out d.json").exit_code == 0);
    REQUIRE(run_cli(dir, "audit --config '" + config + "' --out s1.json", "PHS_LAB_SEED=1")
                .exit_code == 0);
    REQUIRE(run_cli(dir, "audit --config '" + config + "' --out s2.json", "PHS_LAB_SEED=1")
                .exit_code == 0);
    CHECK(slurp(dir / "s1.json") == slurp(dir / "s2.json"));
    CHECK(slurp(dir / "d.json") != slurp(dir / "s1.json"));
}

// ----------------------------------------------------------------------------
// Exit codes and diagnostics
// ----------------------------------------------------------------------------

TEST_CASE("a missing key is named on stderr with the config exit code") {
    const fs::path dir = scratch_dir("missing_key");
    write_file(dir / "bad.cfg", "[model]\nkind = msd\n[run]\nx0 = 1 0\nstep = 1e-3\n");
    const RunResult run = run_cli(dir, "simulate --config bad.cfg");
    CHECK(run.exit_code == 2);
    CHECK(run.err.find("t_end") != std::string::npos);
    CHECK(run.err.find("bad.cfg") != std::string::npos);
}

TEST_CASE("unknown keys and model kinds are configuration errors") {
    const fs::path dir = scratch_dir("unknown");
    write_file(dir / "typo.cfg",
               "[model]\nkind = msd\nmas = 2.0\n[run]\nx0 = 1 0\nt_end = 1\nstep = 1e-3\n");
    const RunResult typo = run_cli(dir, "simulate --config typo.cfg");
    CHECK(typo.exit_code == 2);
    CHECK(typo.err.find("mas") != std::string::npos);

    write_file(dir / "kind.cfg", "[model]\nkind = pendulum\n[run]\nx0 = 1\nt_end = 1\nstep = 1e-3\n");
    const RunResult kind = run_cli(dir, "simulate --config kind.cfg");
    CHECK(kind.exit_code == 2);
    CHECK(kind.err.find("pendulum") != std::string::npos);
}

TEST_CASE("a state blow-up exits with the numerical code") {
    const fs::path dir = scratch_dir("blowup");
    write_file(dir / "blowup.cfg",
               "[model]\nkind = scalar_exp\n"
               "[run]\nx0 = 0.0\nt_end = 2.0\nstep = 1e-3\nblow_up_limit = 0.5\n"
               "[input]\nkind = constant\nvalues = 1.0\n");
    const RunResult run = run_cli(dir, "simulate --config blowup.cfg");
    CHECK(run.exit_code == 3);
    CHECK(run.err.find("blow-up") != std::string::npos);
}

TEST_CASE("an unmet audit tolerance exits with the audit code") {
    const fs::path dir = scratch_dir("strict");
    write_file(dir / "strict.cfg",
               "[model]\nkind = gas_piston\n"
               "[audit]\nkind = legendre\nsamples = 20\nidentity_tolerance = 1e-20\n");
    const RunResult run = run_cli(dir, "audit --config strict.cfg");
    CHECK(run.exit_code == 4);
    CHECK(fs::exists(dir / ".stderr"));
    CHECK(!run.err.empty());
}

TEST_CASE("batch runs report the worst scenario exit code") {
    const fs::path dir = scratch_dir("batch_codes");
    write_file(dir / "strict.cfg",
               "[model]\nkind = gas_piston\n"
               "[audit]\nkind = legendre\nsamples = 20\nidentity_tolerance = 1e-20\n"
               "[output]\njson = strict.json\n");
    const std::string good = (config_dir / "gas_structure_audit.cfg").string();
    const RunResult run =
        run_cli(dir, "audit --config '" + good + "' --config strict.cfg --jobs 2");
    CHECK(run.exit_code == 4);
    CHECK(fs::exists(dir / "gas_structure_audit.json"));
    CHECK(fs::exists(dir / "strict.json"));
}

TEST_CASE("batch runs refuse the single-run output flags") {
    const std::string structure = (config_dir / "gas_structure_audit.cfg").string();
    const std::string legendre = (config_dir / "gas_legendre_audit.cfg").string();
    const fs::path dir = scratch_dir("batch_flags");
    const RunResult run = run_cli(
        dir, "audit --config '" + structure + "' --config '" + legendre + "' --out x.json");
    CHECK(run.exit_code == 2);
    CHECK(!run.err.empty());
}

TEST_CASE("usage problems exit with the configuration code") {
    const fs::path dir = scratch_dir("usage");
    CHECK(run_cli(dir, "").exit_code == 2);                        // no subcommand
    CHECK(run_cli(dir, "storage-lmi --m 2 --k 3").exit_code == 2); // partial flags
    CHECK(run_cli(dir, "storage-lmi").exit_code == 2);             // no source at all
    CHECK(run_cli(dir, "simulate --config /nonexistent.cfg").exit_code == 2);
    CHECK(run_cli(dir, "--help").exit_code == 0);
}

// ----------------------------------------------------------------------------
// Output routing
// ----------------------------------------------------------------------------

TEST_CASE("stdout carries the report when no output file is named") {
    const fs::path dir = scratch_dir("stdout");
    write_file(dir / "plain.cfg",
               "[model]\nkind = msd\n[run]\nx0 = 1 0\nt_end = 1.0\nstep = 1e-3\n");
    const RunResult run = run_cli(dir, "simulate --config plain.cfg");
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.out);
    CHECK(report.contains("balance_residual"));
    CHECK(report.contains("h_end"));
    CHECK(report["supplied_total"].get<double>() == 0.0);
}

TEST_CASE("a time series is refused where no trajectory exists") {
    const fs::path dir = scratch_dir("csv_gate");
    const std::string structure = (config_dir / "gas_structure_audit.cfg").string();
    const RunResult run = run_cli(dir, "audit --config '" + structure + "' --csv x.csv");
    CHECK(run.exit_code == 2);
    CHECK(!fs::exists(dir / "x.csv"));
}

TEST_SUITE_END();
