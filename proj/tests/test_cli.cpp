#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef DEGEL_CLI_PATH
#define DEGEL_CLI_PATH "degel"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DEGEL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("degel_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("cli: radial eigenvalue run emits the Bessel value") {
    const auto dir = fresh_dir("eigenrad");
    write_text(dir / "cfg.json", R"({
        "command": "eigen-radial",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "R": 1.0, "tol": 1e-6})");
    REQUIRE(run_cli("--config " + (dir / "cfg.json").string() + " --out " + dir.string()) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(std::abs(summary.at("lambda_star").get<double>() - 5.78318596) < 1e-4);
    CHECK(fs::exists(dir / "profile.csv"));
}

TEST_CASE("cli: condition report marks missing rotation symmetry without failing") {
    const auto dir = fresh_dir("checkop");
    write_text(dir / "cfg.json", R"({
        "command": "check-operator",
        "operator": {"family": "pseudo_plap", "n": 2, "params": {"p": 2.0, "q": 0.0}},
        "trials": 128, "s_grid": 40})");
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --out " + dir.string()) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("conditions").at("monotonicity").get<bool>());
    CHECK_FALSE(summary.at("conditions").at("rotation_symmetry").get<bool>());
    CHECK(fs::exists(dir / "profile.csv"));
}

TEST_CASE("cli: malformed configs exit with code 4 and leave no artifacts") {
    const auto dir = fresh_dir("badcfg");
    write_text(dir / "bad1.json", "{not json");
    CHECK(run_cli("--config " + (dir / "bad1.json").string() + " --out " + dir.string()) == 4);
    write_text(dir / "bad2.json", R"({"command": "eigen-radial"})");
    CHECK(run_cli("--config " + (dir / "bad2.json").string() + " --out " + dir.string()) == 4);
    write_text(dir / "bad3.json", R"({
        "command": "eigen-radial",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "R": 1.0, "extra_key": true})");
    CHECK(run_cli("--config " + (dir / "bad3.json").string() + " --out " + dir.string()) == 4);
    CHECK_FALSE(fs::exists(dir / "summary.json"));
}

TEST_CASE("cli: blow-up where a solution was required exits with code 2") {
    const auto dir = fresh_dir("blowup");
    write_text(dir / "cfg.json", R"({
        "command": "solve-grid",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "domain": {"type": "rectangle", "a": 1.0, "b": 1.0, "h": 0.0625},
        "delta": 1.0, "lambda": 25.0})");
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --out " + dir.string()) == 2);
}

TEST_CASE("cli: grid solve writes a field, embeds check margins, verify round-trips it") {
    const auto dir = fresh_dir("gridsolve");
    write_text(dir / "cfg.json", R"({
        "command": "solve-grid",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "domain": {"type": "disk", "R": 1.0, "h": 0.0625},
        "delta": 1.0, "lambda": 4.0})");
    REQUIRE(run_cli("--config " + (dir / "cfg.json").string() + " --out " + dir.string()) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("status").get<std::string>() == "converged");
    CHECK(summary.at("verification").at("all_passed").get<bool>());
    for (const auto& chk : summary.at("verification").at("checks"))
        CHECK(chk.contains("margin"));
    REQUIRE(fs::exists(dir / "field.csv"));

    write_text(dir / "verify.json", R"({
        "command": "verify",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "domain": {"type": "disk", "R": 1.0, "h": 0.0625},
        "delta": 1.0, "lambda": 4.0,
        "field": ")" + (dir / "field.csv").string() + R"("})");
    CHECK(run_cli("--config " + (dir / "verify.json").string() + " --out " + dir.string()) == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report.at("all_passed").get<bool>());
}

TEST_CASE("cli: identical config and seed give byte-identical summaries") {
    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    const std::string cfg = R"({
        "command": "check-operator",
        "operator": {"family": "inf_type", "n": 2, "params": {"q": 0.0}},
        "trials": 200, "s_grid": 50})";
    write_text(dir1 / "cfg.json", cfg);
    REQUIRE(run_cli("--config " + (dir1 / "cfg.json").string() + " --seed 777 --out " + dir1.string()) == 0);
    REQUIRE(run_cli("--config " + (dir1 / "cfg.json").string() + " --seed 777 --out " + dir2.string()) == 0);
    CHECK(slurp(dir1 / "summary.json") == slurp(dir2 / "summary.json"));
    CHECK(slurp(dir1 / "profile.csv") == slurp(dir2 / "profile.csv"));
    // a different seed flips the randomized draws but not the verdicts
    const auto dir3 = fresh_dir("det3");
    REQUIRE(run_cli("--config " + (dir1 / "cfg.json").string() + " --seed 778 --out " + dir3.string()) == 0);
    CHECK(nlohmann::json::parse(slurp(dir3 / "summary.json")).at("conditions") ==
          nlohmann::json::parse(slurp(dir1 / "summary.json")).at("conditions"));
}

TEST_CASE("cli: lambda sweep with derivative check and jobs") {
    const auto dir = fresh_dir("sweep");
    write_text(dir / "cfg.json", R"({
        "command": "sweep-lambda",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "domain": {"type": "disk", "R": 1.0, "h": 0.0625},
        "delta": 1.0,
        "lambdas": [3.8, 4.0, 4.2],
        "probes": 8})");
    REQUIRE(run_cli("--config " + (dir / "cfg.json").string() + " --jobs 2 --out " + dir.string()) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("solves").size() == 3);
    CHECK(summary.at("derivative_check").at("passed").get<bool>());
}

TEST_CASE("cli: mask file domain") {
    const auto dir = fresh_dir("mask");
    write_text(dir / "dom.mask",
               "0000000000\n"
               "0222222220\n"
               "0211111120\n"
               "0211111120\n"
               "0211111120\n"
               "0222222220\n"
               "0000000000\n");
    write_text(dir / "cfg.json", R"({
        "command": "solve-grid",
        "operator": {"family": "plap_type", "n": 2, "params": {"q": 0.0, "a": 0.0}},
        "domain": {"type": "mask", "path": ")" + (dir / "dom.mask").string() + R"(", "h": 0.1},
        "delta": 1.0, "lambda": 1.0})");
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --out " + dir.string()) == 0);
}
