#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraceig/commands.hpp"
#include "fraceig/csv.hpp"
#include "fraceig/run_config.hpp"

using namespace fraceig;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fraceig_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing: defaults, comments, overrides") {
    const RunConfig defaults = parse_config_text("");
    CHECK(defaults.dim == 1);
    CHECK(defaults.n == 31);
    CHECK(defaults.preset == "exp");

    const RunConfig cfg = parse_config_text(
        "# a comment line\n"
        "dim = 2\n"
        "n = 15        # trailing comment\n"
        "preset = mems2\n"
        "weight = cospi\n"
        "\n"
        "seed = 7\n"
        "svg = true\n");
    CHECK(cfg.dim == 2);
    CHECK(cfg.n == 15);
    CHECK(cfg.preset == "mems2");
    CHECK(cfg.weight == "cospi");
    CHECK(cfg.seed == 7);
    CHECK(cfg.svg);
}

TEST_CASE("config parsing: malformed input reports the line number") {
    try {
        parse_config_text("dim = 1\nnot a key value pair\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("frobnicate = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dim = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("lambda_policy = magic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("tol = -1\n"), ConfigError);
}

TEST_CASE("csv: floats carry 17 significant digits") {
    CHECK(CsvWriter::num(0.1) == "0.10000000000000001");
    CHECK(CsvWriter::num(1.0) == "1");
    CHECK(CsvWriter::num(-2.5) == "-2.5");
}

TEST_CASE("branch subcommand: empty lambda grid yields a header-only csv") {
    const fs::path dir = fresh_dir("branch_empty");
    RunConfig cfg;
    cfg.lambda_points = 0;
    std::ostringstream log;
    const int code = run_command("branch", cfg, dir.string(), log);
    CHECK(code == kExitOk);
    CHECK(slurp(dir / "branch.csv") == "lambda,sup_u,mu1,iterations,residual\n");
}

TEST_CASE("branch subcommand: identical config and seed give identical bytes") {
    RunConfig cfg;
    cfg.n = 15;
    cfg.lambda_points = 5;
    cfg.bracket_tol = 1e-2;
    cfg.svg = true;

    const fs::path dir1 = fresh_dir("branch_det1");
    const fs::path dir2 = fresh_dir("branch_det2");
    std::ostringstream log1, log2;
    REQUIRE(run_command("branch", cfg, dir1.string(), log1) == kExitOk);
    REQUIRE(run_command("branch", cfg, dir2.string(), log2) == kExitOk);
    CHECK(slurp(dir1 / "branch.csv") == slurp(dir2 / "branch.csv"));
    CHECK(slurp(dir1 / "branch.svg") == slurp(dir2 / "branch.svg"));
    // Five sweep rows follow the header.
    std::istringstream rows(slurp(dir1 / "branch.csv"));
    std::string line;
    int count = 0;
    while (std::getline(rows, line)) ++count;
    CHECK(count == 6);
}

TEST_CASE("lambda-star subcommand appends rows to summary.csv") {
    const fs::path dir = fresh_dir("lambda_star");
    RunConfig cfg;
    cfg.n = 15;
    cfg.bracket_tol = 1e-2;
    std::ostringstream log;
    REQUIRE(run_command("lambda-star", cfg, dir.string(), log) == kExitOk);
    REQUIRE(run_command("lambda-star", cfg, dir.string(), log) == kExitOk);
    std::istringstream rows(slurp(dir / "summary.csv"));
    std::string line;
    int count = 0;
    while (std::getline(rows, line)) ++count;
    CHECK(count == 3);
    CHECK(log.str().find("lambda* bracket") != std::string::npos);
}

TEST_CASE("props subcommand: log-convexity gates mark refused rows") {
    const fs::path dir = fresh_dir("props_pow");
    RunConfig cfg;
    cfg.preset = "power(3)";
    std::ostringstream log;
    REQUIRE(run_command("props", cfg, dir.string(), log) == kExitOk);
    const std::string csv = slurp(dir / "props.csv");
    CHECK(csv.find("refused: not log-convex") != std::string::npos);
    CHECK(csv.find("criticality_ratio") != std::string::npos);

    const fs::path dir2 = fresh_dir("props_exp");
    RunConfig cfg2;
    std::ostringstream log2;
    REQUIRE(run_command("props", cfg2, dir2.string(), log2) == kExitOk);
    CHECK(slurp(dir2 / "props.csv").find("refused") == std::string::npos);
}

TEST_CASE("exit codes: config errors and bad subcommands") {
    const fs::path dir = fresh_dir("exit_codes");
    std::ostringstream log;

    RunConfig bad;
    bad.preset = "gauss";
    CHECK(run_command("props", bad, dir.string(), log) == kExitConfigError);

    RunConfig one_d;
    one_d.dim = 1;
    CHECK(run_command("identities", one_d, dir.string(), log) == kExitConfigError);

    RunConfig ok;
    CHECK(run_command("no-such-command", ok, dir.string(), log) == kExitConfigError);

    CHECK(run_command("props", ok, "/proc/nonexistent/out", log) == kExitConfigError);
}

TEST_CASE("uniqueness subcommand writes report.csv and a key = value block") {
    const fs::path dir = fresh_dir("uniqueness_cmd");
    RunConfig cfg;
    cfg.dim = 2;
    cfg.n = 9;
    cfg.weight = "cospi";
    cfg.bracket_tol = 1e-2;
    std::ostringstream log;
    REQUIRE(run_command("uniqueness", cfg, dir.string(), log) == kExitOk);
    const std::string out = log.str();
    CHECK(out.find("certified = ") != std::string::npos);
    CHECK(out.find("min_s = ") != std::string::npos);
    const std::string csv = slurp(dir / "report.csv");
    CHECK(csv.find("lambda,gamma,alpha,theta") == 0);
}
