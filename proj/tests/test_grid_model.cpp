#include <doctest.h>

#include <fstream>
#include <random>

#include "frequc/errors.hpp"
#include "frequc/grid_model.hpp"
#include "frequc/sfr_oracle.hpp"
#include "support.hpp"

using namespace frequc;
using namespace frequc::grid;
using frequc::testing::data_dir;
using frequc::testing::scratch;

namespace {

grid::PowerSystem six_bus() { return load_system(data_dir() / "six_bus"); }

Network triangle() {
    Network n;
    n.buses = {"1", "2", "3"};
    n.slack_bus = "1";
    n.lines = {{"a", "1", "2", 0.1, 100}, {"b", "2", "3", 0.1, 100}, {"c", "1", "3", 0.1, 100}};
    return n;
}

void copy_fixture(const std::filesystem::path& to) {
    for (const auto& e : std::filesystem::directory_iterator(data_dir() / "six_bus"))
        if (e.path().extension() != ".md") std::filesystem::copy_file(e.path(), to / e.path().filename());
}

void replace_line(const std::filesystem::path& file, const std::string& from, const std::string& to) {
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    text.replace(at, from.size(), to);
    std::ofstream(file) << text;
}

}  // namespace

TEST_CASE("fixture loads with the documented shape") {
    const auto sys = six_bus();
    CHECK(sys.units.size() == 3);
    CHECK(sys.winds.size() == 1);
    CHECK(sys.network.buses.size() == 6);
    CHECK(sys.hours == 24);
    CHECK(sys.peak_load() == doctest::Approx(210.0));
    CHECK(sys.peak_hour() == 20);
    // Blank sigma falls back to 5% of the forecast.
    CHECK(sys.winds[0].sigma[0] == doctest::Approx(0.05 * sys.winds[0].forecast[0]));
}

TEST_CASE("inertia conversion pins the single-unit peak RoCoF") {
    const auto sys = six_bus();
    const int h = sys.peak_hour();
    const auto ev = event_params(sys, h);
    sfr::SfrScenario s;
    s.inertia = unit_inertia(sys, sys.units[0]) + total_wind_inertia(sys);
    s.damping = ev.damping;
    s.imbalance = ev.imbalance;
    CHECK(s.inertia == doctest::Approx(40.0).epsilon(1e-15));
    CHECK(std::abs(sfr::rocof_initial(s) - 0.2625) <= 1e-9);
    CHECK(inertia_mwspherz(8.0, 200.0, 50.0) == 32.0);
}

TEST_CASE("save and reload gives an equal system") {
    const auto sys = six_bus();
    const auto dir = scratch("grid_round_trip");
    save_system(sys, dir);
    CHECK(load_system(dir) == sys);
}

TEST_CASE("triangle shift factors match the parallel-path split") {
    auto net = triangle();
    const auto s = compute_ptdf(net);
    // Injection at bus 2 returns to the slack over a direct path (x) and a
    // path of two lines (2x): two thirds go direct.
    CHECK(s(0, 1) == doctest::Approx(-2.0 / 3.0));
    CHECK(s(1, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(s(2, 1) == doctest::Approx(-1.0 / 3.0));
    for (int l = 0; l < 3; ++l) CHECK(s(l, 0) == 0.0);
}

TEST_CASE("six-bus shift factors satisfy KCL, bounds and superposition") {
    const auto sys = six_bus();
    const auto& net = sys.network;
    const auto& s = net.ptdf;
    const int slack = net.bus_index(net.slack_bus);
    CHECK(s.cwiseAbs().maxCoeff() <= 1.0 + 1e-6);
    for (Eigen::Index l = 0; l < s.rows(); ++l) CHECK(s(l, slack) == 0.0);

    for (Eigen::Index b = 0; b < s.cols(); ++b) {
        if (b == slack) continue;
        Eigen::VectorXd inj = Eigen::VectorXd::Zero(s.cols());
        inj(b) = 1.0;
        inj(slack) = -1.0;
        const auto flow = line_flows(net, inj);
        for (Eigen::Index k = 0; k < s.cols(); ++k) {
            double out = 0.0;
            for (std::size_t l = 0; l < net.lines.size(); ++l) {
                if (net.bus_index(net.lines[l].from) == k) out += flow(static_cast<Eigen::Index>(l));
                if (net.bus_index(net.lines[l].to) == k) out -= flow(static_cast<Eigen::Index>(l));
            }
            CHECK(out == doctest::Approx(inj(k)).epsilon(1e-9));
        }
    }

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int n = 0; n < 100; ++n) {
        Eigen::VectorXd a(s.cols()), b(s.cols());
        for (Eigen::Index k = 0; k < s.cols(); ++k) {
            a(k) = u(rng);
            b(k) = u(rng);
        }
        const double k = u(rng);
        const Eigen::VectorXd lhs = line_flows(net, a + k * b);
        const Eigen::VectorXd rhs = line_flows(net, a) + k * line_flows(net, b);
        CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("disconnected or malformed networks are rejected") {
    auto net = triangle();
    net.buses.push_back("4");
    CHECK_THROWS_AS(compute_ptdf(net), ValidationError);
    net = triangle();
    net.lines[0].reactance = 0.0;
    CHECK_THROWS_AS(compute_ptdf(net), ValidationError);
}

TEST_CASE("a shift-factor file bypasses the computation") {
    const auto dir = scratch("grid_ptdf_file");
    copy_fixture(dir);
    {
        std::ofstream out(dir / "ptdf.csv");
        out << "line_id,bus,factor\n";
        for (const auto& l : six_bus().network.lines) out << l.id << ",2,0.5\n";
    }
    const auto sys = load_system(dir);
    CHECK(sys.network.ptdf_from_file);
    CHECK(sys.network.ptdf(0, sys.network.bus_index("2")) == 0.5);
    CHECK(sys.network.ptdf(0, sys.network.bus_index("3")) == 0.0);
}

TEST_CASE("input errors name the offending file or entity") {
    SUBCASE("missing wind profile") {
        const auto dir = scratch("grid_missing");
        copy_fixture(dir);
        std::filesystem::remove(dir / "wind_profile.csv");
        try {
            load_system(dir);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("wind_profile.csv") != std::string::npos);
        }
    }
    SUBCASE("duplicate unit id") {
        const auto dir = scratch("grid_duplicate");
        copy_fixture(dir);
        replace_line(dir / "units.csv", "G2,2,", "G1,2,");
        CHECK_THROWS_AS(load_system(dir), ValidationError);
    }
    SUBCASE("p_min above p_max") {
        const auto dir = scratch("grid_pmin");
        copy_fixture(dir);
        replace_line(dir / "units.csv", "G3,6,180,54,", "G3,6,180,254,");
        try {
            load_system(dir);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("G3") != std::string::npos);
        }
    }
    SUBCASE("non-numeric field") {
        const auto dir = scratch("grid_text");
        copy_fixture(dir);
        replace_line(dir / "lines.csv", "L1,1,2,0.170", "L1,1,2,abc");
        try {
            load_system(dir);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("lines.csv") != std::string::npos);
        }
    }
    SUBCASE("unknown load bus") {
        const auto dir = scratch("grid_bus");
        copy_fixture(dir);
        replace_line(dir / "load.csv", "\n3,", "\n9,");
        CHECK_THROWS_AS(load_system(dir), ValidationError);
    }
}

TEST_CASE("event parameters scale with hourly load") {
    const auto sys = six_bus();
    const auto ev = event_params(sys, 0);
    CHECK(ev.imbalance == doctest::Approx(sys.policy.imbalance_frac * sys.total_load(0)));
    CHECK(ev.damping == doctest::Approx(sys.policy.damping_frac * sys.total_load(0)));
    CHECK_THROWS_AS(event_params(sys, 24), DomainError);
}
