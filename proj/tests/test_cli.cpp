#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "frequc/cli.hpp"
#include "support.hpp"

using namespace frequc;
using frequc::testing::data_dir;
using frequc::testing::scratch;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "frequc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string scenario(const std::string& name) { return (data_dir() / "scenarios" / name).string(); }

fs::path fixture_copy(const std::string& name) {
    const auto dir = scratch(name);
    for (const auto& e : fs::directory_iterator(data_dir() / "six_bus"))
        fs::copy_file(e.path(), dir / e.path().filename());
    return dir;
}

}  // namespace

TEST_CASE("simulate writes the trajectory and metrics") {
    const auto out = scratch("cli_sim");
    REQUIRE(run({"simulate", "-q", "--input", scenario("g1_only_peak.json"), "--output", out.string()}) == 0);
    const auto m = nlohmann::json::parse(slurp(out / "metrics.json"));
    CHECK(m.at("rocof0").get<double>() == doctest::Approx(0.2625));
    CHECK(m.at("qss_closed_form").get<double>() == doctest::Approx(0.513064133));
    CHECK(slurp(out / "trajectory.csv").rfind("t,df_hz,pfr_total_mw,pfr_g_G1,pfr_w\n", 0) == 0);
}

TEST_CASE("simulate an hour of a system directory") {
    const auto out = scratch("cli_sim_sys");
    const auto sys = (data_dir() / "six_bus").string();
    REQUIRE(run({"simulate", "-q", "-i", sys, "-o", out.string(), "--hour", "21"}) == 0);
    const auto m = nlohmann::json::parse(slurp(out / "metrics.json"));
    // All three units online plus the farm.
    const double h = (8 * 200 + 5 * 150 + 6 * 180 + 5 * 80) / 50.0;
    CHECK(m.at("rocof0").get<double>() == doctest::Approx(21.0 / (2.0 * h)));
    CHECK(run({"simulate", "-q", "-i", sys, "-o", out.string(), "--hour", "25"}) == 2);
    CHECK(run({"simulate", "-q", "-i", sys, "-o", out.string()}) == 2);
    REQUIRE(run({"simulate", "-q", "-i", sys, "-o", out.string(), "--hour", "21", "--dp", "10.5"}) == 0);
    CHECK(nlohmann::json::parse(slurp(out / "metrics.json")).at("rocof0").get<double>() ==
          doctest::Approx(10.5 / (2.0 * h)));
}

TEST_CASE("tightness output is byte-identical across runs and job counts") {
    const auto a = scratch("cli_tight_a");
    const auto b = scratch("cli_tight_b");
    REQUIRE(run({"tightness", "-q", "-i", scenario("all_online.json"), "-o", a.string()}) == 0);
    REQUIRE(run({"tightness", "-q", "-i", scenario("all_online.json"), "-o", b.string(), "--jobs", "3"}) == 0);
    for (const char* f : {"tightness.csv", "tightness_uneven.csv", "tightness_curves.csv"}) {
        CHECK(!slurp(a / f).empty());
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "tightness.csv").rfind("H,N,nadir_bp,nadir_oracle,rel_err\n", 0) == 0);

    const auto c = scratch("cli_tight_c");
    REQUIRE(run({"tightness", "-q", "-i", scenario("all_online.json"), "-o", c.string(), "--segments", "2"}) == 0);
    std::istringstream rows(slurp(c / "tightness.csv"));
    std::string line;
    int n = 0;
    while (std::getline(rows, line)) ++n;
    CHECK(n == 1 + 4);
}

TEST_CASE("bad arguments and inputs exit with code 2") {
    const auto out = scratch("cli_bad");
    CHECK(run({}) == 2);
    CHECK(run({"simulate"}) == 2);
    CHECK(run({"simulate", "-i", "/nonexistent.json", "-o", out.string()}) == 2);
    CHECK(run({"tightness", "-i", scenario("all_online.json"), "--segments", "0"}) == 2);
    CHECK(run({"tightness", "-i", scenario("all_online.json"), "--dt", "-1"}) == 2);
    CHECK(run({"solve", "-i", (data_dir() / "six_bus").string(), "--mode", "fast"}) == 2);
    CHECK(run({"solve", "-i", (data_dir() / "six_bus").string(), "--bound-depth", "9"}) == 2);
    CHECK(run({"solve", "-i", (data_dir() / "six_bus").string(), "--drcc-strategy", "exact"}) == 2);
    CHECK(run({"solve", "-i", (data_dir() / "six_bus").string(), "--gap", "abc"}) == 2);
    CHECK(run({"simulate", "-i", scenario("all_online.json"), "-o", "/proc/forbidden"}) == 2);

    const auto dir = fixture_copy("cli_missing");
    fs::remove(dir / "wind_profile.csv");
    CHECK(run({"solve", "-q", "-i", dir.string(), "-o", out.string()}) == 2);
}

TEST_CASE("help exits cleanly") { CHECK(run({"--help"}) == 0); }

TEST_CASE("an unsatisfiable policy exits with code 3") {
    const auto dir = fixture_copy("cli_infeasible");
    auto policy = nlohmann::json::parse(slurp(dir / "policy.json"));
    policy["rocof_max"] = 0.05;
    std::ofstream(dir / "policy.json") << policy.dump();
    const auto out = scratch("cli_infeasible_out");
    CHECK(run({"solve", "-q", "-i", dir.string(), "-o", out.string()}) == 3);
    const auto sol = nlohmann::json::parse(slurp(out / "solution.json"));
    CHECK(sol.at("status") == "infeasible");
}

TEST_CASE("solve and report") {
    const auto nf = scratch("cli_solve_nf");
    REQUIRE(run({"solve", "-q", "-i", (data_dir() / "six_bus").string(), "-o", nf.string(), "--mode", "no_freq"}) == 0);
    const auto sol = nlohmann::json::parse(slurp(nf / "solution.json"));
    CHECK(sol.at("mode") == "no_freq");
    CHECK(sol.contains("security"));
    const auto report = nlohmann::json::parse(slurp(nf / "security_report.json"));
    CHECK(report.at("failures").get<int>() > 0);

    const auto copy = scratch("cli_solve_nf2");
    fs::copy_file(nf / "solution.json", copy / "solution.json");
    const auto rep = scratch("cli_report");
    REQUIRE(run({"report", "-q", "-i", nf.string(), "-i", (copy / "solution.json").string(), "-o", rep.string()}) == 0);
    const auto csv = slurp(rep / "report.csv");
    CHECK(csv.rfind("metric,frequc_test_cli_solve_nf,frequc_test_cli_solve_nf2\n", 0) == 0);
    CHECK(csv.find("\nmax_rocof_hz_s,0.2625,0.2625\n") != std::string::npos);
    CHECK(slurp(rep / "report.txt").find("total_cost") != std::string::npos);
}
