#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "solpath/csvio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using solpath::CsvTable;
using solpath::read_csv;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("solpath_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

CliResult run_cli(const std::string& args) {
    const fs::path log = fresh_dir("log") / "output.log";
    const std::string cmd =
        std::string(SOLPATH_CLI_PATH) + " " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult res;
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    res.output = buf.str();
    return res;
}

std::string config_path(const std::string& name) {
    return std::string(SOLPATH_CONFIG_DIR) + "/" + name;
}

std::string set_out(const fs::path& dir) {
    return " --set output.dir=" + dir.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("run lsp on the shipped toy config succeeds with a decreasing path error") {
    const fs::path out = fresh_dir("toy_lsp");
    const CliResult res = run_cli("run " + config_path("toy_lsp.toml") + set_out(out));
    CHECK(res.exit_code == 0);

    CHECK(fs::exists(out / "trace.csv"));
    CHECK(fs::exists(out / "coefficients.csv"));
    CHECK(fs::exists(out / "summary.json"));
    CHECK(fs::exists(out / "meta.json"));

    const CsvTable trace = read_csv((out / "trace.csv").string());
    REQUIRE(trace.rows.size() > 5);
    const std::size_t pe = trace.column("path_error");
    const double first = trace.rows.front()[pe];
    const double last = trace.rows.back()[pe];
    CHECK(last < 0.2 * first);
    CHECK(last < 1e-3);

    const json summary = read_json(out / "summary.json");
    CHECK(summary.at("method") == "lsp");
    CHECK(summary.at("diverged") == false);
    CHECK(summary.at("q_final") == 4);
    CHECK(summary.at("eps_sp_final").get<double>() == doctest::Approx(last));

    const json meta = read_json(out / "meta.json");
    CHECK(meta.contains("timestamp_unix"));
    CHECK(meta.contains("wall_seconds"));
}

TEST_CASE("reruns with the same seed produce byte-identical csv artifacts") {
    const fs::path a = fresh_dir("rerun_a");
    const fs::path b = fresh_dir("rerun_b");
    CHECK(run_cli("run " + config_path("toy_lsp.toml") + set_out(a)).exit_code == 0);
    CHECK(run_cli("run " + config_path("toy_lsp.toml") + set_out(b)).exit_code == 0);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "coefficients.csv") == slurp(b / "coefficients.csv"));

    const fs::path c = fresh_dir("rerun_c");
    CHECK(run_cli("run " + config_path("toy_lsp.toml") + set_out(c) +
                  " --set method.seed=99")
              .exit_code == 0);
    CHECK(slurp(a / "coefficients.csv") != slurp(c / "coefficients.csv"));
}

TEST_CASE("validation failures exit with code 1 and a usable message") {
    const fs::path out = fresh_dir("bad");

    CliResult res = run_cli("run " + config_path("toy_lsp.toml") + set_out(out) +
                            " --set method.eta_bar=2.0");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("(0, 1]") != std::string::npos);

    res = run_cli("run /nonexistent/config.toml");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("/nonexistent/config.toml") != std::string::npos);

    res = run_cli("run " + config_path("toy_lsp.toml") + set_out(out) +
                  " --set problem.name=weighted_logistic --set problem.data=/nonexistent/data.csv");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("/nonexistent/data.csv") != std::string::npos);

    res = run_cli("frobnicate " + config_path("toy_lsp.toml"));
    CHECK(res.exit_code != 0);
}

TEST_CASE("an understated step-size constant diverges and exits with code 2") {
    const fs::path out = fresh_dir("diverge");
    const CliResult res = run_cli("run " + config_path("toy_lsp.toml") + set_out(out) +
                                  " --set method.C_scale=0.02");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("non-finite") != std::string::npos);
    const json summary = read_json(out / "summary.json");
    CHECK(summary.at("diverged") == true);
}

TEST_CASE("run alsp writes a stage table and a stop reason") {
    const fs::path out = fresh_dir("toy_alsp");
    const CliResult res = run_cli("run " + config_path("toy_alsp.toml") + set_out(out));
    CHECK(res.exit_code == 0);

    const CsvTable stages = read_csv((out / "stages.csv").string());
    REQUIRE(stages.rows.size() >= 2);
    const std::size_t qc = stages.column("q");
    CHECK(stages.rows.front()[qc] == 1.0);
    for (std::size_t i = 1; i < stages.rows.size(); ++i)
        CHECK(stages.rows[i][qc] > stages.rows[i - 1][qc]);

    const json summary = read_json(out / "summary.json");
    CHECK(summary.at("method") == "alsp");
    const std::string reason = summary.at("stop_reason");
    CHECK((reason == "budget" || reason == "stalled_at_max_q"));
}

TEST_CASE("run discretization writes the grid path and honors the schedule") {
    const fs::path out = fresh_dir("toy_disc");
    const CliResult res = run_cli("run " + config_path("toy_disc.toml") + set_out(out));
    CHECK(res.exit_code == 0);

    const json summary = read_json(out / "summary.json");
    CHECK(summary.at("points_per_axis") == 10);
    CHECK(summary.at("steps_per_point") == 4);
    CHECK(summary.at("gradient_calls") == summary.at("scheduled_calls"));
    CHECK(summary.at("grid_pass_error").get<double>() < 1e-6);
    CHECK(summary.at("eps_sp").get<double>() < 0.02);

    const CsvTable path = read_csv((out / "path.csv").string());
    CHECK(path.rows.size() == 10);
    REQUIRE(path.header.size() == 2);
    CHECK(path.header[0] == "lambda_0");
    CHECK(path.header[1] == "theta_0");
}

TEST_CASE("groundtruth caches to a file and rejects a mismatched problem") {
    const fs::path out = fresh_dir("gt");
    CliResult res = run_cli("groundtruth " + config_path("toy_disc.toml") + set_out(out));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("groundtruth:") != std::string::npos);
    CHECK(fs::exists(out / "groundtruth.csv"));

    const json summary = read_json(out / "groundtruth_summary.json");
    CHECK(summary.at("nodes") == 257);
    CHECK(summary.at("max_residual").get<double>() <= 1e-7);

    // The cache was computed for the identity path; a cubic run must refuse it.
    res = run_cli("run " + config_path("toy_lsp.toml") + set_out(out) +
                  " --set groundtruth.file=" + (out / "groundtruth.csv").string());
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("was computed for") != std::string::npos);
}

TEST_CASE("audit passes on the healthy config and fails the scaled-C control") {
    const fs::path out = fresh_dir("audit");
    CliResult res = run_cli("audit " + config_path("audit_toy.toml") + set_out(out));
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(out / "audit_rwgc.csv"));
    CHECK(fs::exists(out / "audit_decomposition.csv"));
    json summary = read_json(out / "audit_summary.json");
    CHECK(summary.at("rwgc_pass") == true);
    CHECK(summary.at("decomposition_pass") == true);
    CHECK(summary.at("all_pass") == true);

    const fs::path out2 = fresh_dir("audit_ctrl");
    res = run_cli("audit " + config_path("audit_toy.toml") + set_out(out2) +
                  " --set audit.scale_C=0.05 --set audit.kind=rwgc");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("FAIL") != std::string::npos);
    summary = read_json(out2 / "audit_summary.json");
    CHECK(summary.at("rwgc_pass") == false);
    CHECK(summary.at("all_pass") == false);
}

TEST_CASE("spectra reports the legendre constants") {
    const fs::path out = fresh_dir("spectra");
    const CliResult res = run_cli("spectra " + config_path("spectra_legendre.toml") + set_out(out));
    CHECK(res.exit_code == 0);

    const CsvTable table = read_csv((out / "spectra.csv").string());
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][table.column("q")] == 6.0);
    CHECK(table.rows[0][table.column("C")] == doctest::Approx(6.0).epsilon(1e-3));
    CHECK(table.rows[0][table.column("c")] == doctest::Approx(1.0 / 11.0).epsilon(1e-6));
    CHECK(table.rows[0][table.column("ratio")] <= 2.0 * 6.0 * 6.0);
}

TEST_CASE("frontier emits one calibrated row per delta with exact accounting") {
    const fs::path out = fresh_dir("frontier");
    const CliResult res = run_cli("frontier " + config_path("toy_disc.toml") + set_out(out) +
                                  " --set \"method.deltas=[0.08, 0.02, 0.005]\"");
    CHECK(res.exit_code == 0);

    const CsvTable table = read_csv((out / "frontier.csv").string());
    REQUIRE(table.rows.size() == 3);
    const std::size_t calls = table.column("gradient_calls");
    const std::size_t eps = table.column("eps_sp");
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i][calls] > table.rows[i - 1][calls]);
        CHECK(table.rows[i][eps] < table.rows[i - 1][eps]);
    }
    // Each achieved sup gap must respect its target delta.
    const std::size_t dc = table.column("delta");
    for (const std::vector<double>& row : table.rows) CHECK(row[eps] <= row[dc]);
}

TEST_CASE("compare merges learning and discretization legs into one table") {
    const fs::path out = fresh_dir("compare");
    const CliResult res = run_cli("compare " + config_path("compare_lsp.toml") + " " +
                                  config_path("compare_disc.toml") + set_out(out));
    CHECK(res.exit_code == 0);

    // The merged table mixes text and numeric cells, so scan it by hand.
    std::ifstream in(out / "compare.csv");
    REQUIRE(static_cast<bool>(in));
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,gradient_calls,eps_sp");
    int lsp_rows = 0, disc_rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("lsp_q4,", 0) == 0) ++lsp_rows;
        if (line.rfind("discretization,", 0) == 0) ++disc_rows;
    }
    CHECK(lsp_rows >= 5);
    CHECK(disc_rows == 5);
}

TEST_CASE("relative output directories honor the SOLPATH_OUT prefix") {
    const fs::path base = fresh_dir("envbase");
    REQUIRE(::setenv("SOLPATH_OUT", base.c_str(), 1) == 0);
    const CliResult res =
        run_cli("spectra " + config_path("spectra_legendre.toml") + " --set output.dir=rel_out");
    REQUIRE(::unsetenv("SOLPATH_OUT") == 0);
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(base / "rel_out" / "spectra.csv"));
}
