#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "frequc/errors.hpp"
#include "frequc/sfr_oracle.hpp"
#include "support.hpp"

using namespace frequc;
using namespace frequc::sfr;
using frequc::testing::data_dir;
using frequc::testing::rel_err;

namespace {

SfrScenario load(const std::string& name) {
    std::ifstream in(data_dir() / "scenarios" / name);
    return scenario_from_json(nlohmann::json::parse(in));
}

// Midpoint integration of the switched model from t = 0 with the dead band
// written as max(0, df - f_db); no event location.
std::pair<double, double> naive_nadir(const SfrScenario& s, double dt) {
    double df = 0.0, t = 0.0, best = 0.0, best_t = 0.0;
    std::vector<double> p(s.governors.size(), 0.0), mid(p.size());
    auto rates = [&](double d, const std::vector<double>& q, std::vector<double>& dq) {
        const double over = std::max(0.0, d - s.dead_band);
        double pfr = s.wind_droop * over;
        for (std::size_t i = 0; i < q.size(); ++i) {
            pfr += q[i];
            dq[i] = (s.governors[i].droop * over - q[i]) / s.governors[i].response_time;
        }
        return (s.imbalance - pfr - s.damping * d) / (2.0 * s.inertia);
    };
    std::vector<double> k1(p.size()), k2(p.size());
    while (t < s.horizon) {
        const double d1 = rates(df, p, k1);
        for (std::size_t i = 0; i < p.size(); ++i) mid[i] = p[i] + 0.5 * dt * k1[i];
        const double d2 = rates(df + 0.5 * dt * d1, mid, k2);
        df += dt * d2;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += dt * k2[i];
        t += dt;
        if (df > best) {
            best = df;
            best_t = t;
        }
    }
    return {best, best_t};
}

SfrScenario random_scenario(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> h(20.0, 120.0), kd(0.5, 4.0), dp(5.0, 30.0),
        tg(1.0, 15.0), g(0.0, 30.0), gw(0.0, 30.0);
    SfrScenario s;
    s.inertia = h(rng);
    s.damping = kd(rng);
    s.imbalance = dp(rng);
    s.dead_band = 0.015;
    s.wind_droop = gw(rng);
    s.horizon = 30.0;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) s.governors.push_back({"g" + std::to_string(i), tg(rng), g(rng)});
    return s;
}

}  // namespace

TEST_CASE("initial RoCoF of the single-unit peak fixture") {
    const auto s = load("g1_only_peak.json");
    // Reference value: 0.2625 Hz/s.
    CHECK(std::abs(rocof_initial(s) - 0.2625) <= 1e-9);
    CHECK(std::abs(metrics(simulate(s)).rocof0 - 0.2625) <= 1e-9);
}

TEST_CASE("closed-form QSS of the single-unit peak fixture") {
    const auto s = load("g1_only_peak.json");
    const double expected = (s.imbalance + s.total_droop() * s.dead_band) / (s.total_droop() + s.damping);
    CHECK(qss_closed_form(s) == doctest::Approx(expected).epsilon(1e-14));
    // Reference value: 0.5131 Hz.
    CHECK(std::abs(qss_closed_form(s) - 0.5131) <= 1e-4);
}

TEST_CASE("all-online nadir against the published value and an independent integrator") {
    const auto s = load("all_online.json");
    const auto m = metrics(simulate(s));
    // Reference value: 0.3884 Hz.
    CHECK(rel_err(m.nadir_df, 0.3884) <= 0.01);
    const auto [nadir, at] = naive_nadir(s, 1e-5);
    CHECK(rel_err(m.nadir_df, nadir) <= 1e-4);
    CHECK(std::abs(m.nadir_t - at) <= 0.01);
}

TEST_CASE("stage 1 matches its closed form and rises monotonically") {
    const auto s = load("all_online.json");
    const auto st = stage1_analytic(s);
    REQUIRE(st.t_db);
    const double tau = 2.0 * s.inertia / s.damping;
    const double expected = -tau * std::log(1.0 - s.dead_band * s.damping / s.imbalance);
    CHECK(*st.t_db == doctest::Approx(expected).epsilon(1e-10));
    const auto traj = simulate(s, 1e-4);
    for (std::size_t i = 1; i < traj.size() && traj.t[i] <= *st.t_db; ++i) CHECK(traj.df[i] > traj.df[i - 1]);
}

TEST_CASE("event that never leaves the dead band") {
    SfrScenario s = load("all_online.json");
    s.imbalance = 0.01;
    const auto traj = simulate(s);
    CHECK_FALSE(traj.t_db.has_value());
    CHECK(qss_closed_form(s) == doctest::Approx(s.imbalance / s.damping));
    for (std::size_t i = 0; i < traj.size(); ++i) CHECK(traj.pfr_total(i) == 0.0);
}

TEST_CASE("oracle properties on random scenarios") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 40; ++n) {
        auto s = random_scenario(rng);
        s.horizon = 200.0;
        const auto traj = simulate(s, 2e-3);
        const auto m = metrics(traj);

        if (m.qss_converged) CHECK(rel_err(m.qss_df, qss_closed_form(s)) <= 0.005);

        double steepest = 0.0;
        for (std::size_t i = 1; i < traj.size(); ++i)
            steepest = std::max(steepest, std::abs(traj.df[i] - traj.df[i - 1]) / (traj.t[i] - traj.t[i - 1]));
        CHECK(steepest <= m.rocof0 * 1.01);
        CHECK(m.rocof0 == doctest::Approx(rocof_initial(s)));
    }
}

TEST_CASE("halving the step barely moves the nadir") {
    std::mt19937_64 rng(12);
    for (int n = 0; n < 10; ++n) {
        const auto s = random_scenario(rng);
        const double a = metrics(simulate(s, 1e-3)).nadir_df;
        const double b = metrics(simulate(s, 5e-4)).nadir_df;
        CHECK(rel_err(a, b) < 1e-4);
    }
}

TEST_CASE("reserve caps saturate the primary response") {
    auto s = load("all_online.json");
    s.reserve_caps = ReserveCaps{{2.0, 2.0, 2.0}, 1.0};
    const auto capped = simulate(s);
    for (std::size_t i = 0; i < capped.size(); ++i) {
        for (const auto& g : capped.pfr_g) CHECK(g[i] <= 2.0 + 1e-12);
        CHECK(capped.pfr_w[i] <= 1.0 + 1e-12);
    }
    s.reserve_caps.reset();
    CHECK(metrics(capped).nadir_df > metrics(simulate(s)).nadir_df);
}

TEST_CASE("scenario validation and JSON round trip") {
    const auto s = load("all_online.json");
    const auto back = scenario_from_json(scenario_to_json(s));
    CHECK(back.inertia == s.inertia);
    CHECK(back.governors.size() == s.governors.size());
    CHECK(back.total_droop() == s.total_droop());

    auto bad = s;
    bad.inertia = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = s;
    bad.governors[0].response_time = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(simulate(s, 1.0), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json{{"h_sys", 1.0}}), ParseError);
}

TEST_CASE("trajectory CSV header and precision") {
    auto s = load("g1_only_peak.json");
    s.horizon = 1.0;
    const auto csv = trajectory_csv(simulate(s, 0.01));
    CHECK(csv.rfind("t,df_hz,pfr_total_mw,pfr_g_G1,pfr_w\n", 0) == 0);
    // Before the dead band only damping acts: df = dP/D (1 - exp(-D t / 2H)).
    const double df = s.imbalance / s.damping * (1.0 - std::exp(-s.damping * 0.01 / (2.0 * s.inertia)));
    const double t_db = -2.0 * s.inertia / s.damping * std::log(1.0 - s.dead_band * s.damping / s.imbalance);
    char row[64];
    std::snprintf(row, sizeof row, "\n0.01,%.9g,", df);
    CHECK(csv.find(row) != std::string::npos);
    std::snprintf(row, sizeof row, "\n%.9g,0.015,", t_db);
    CHECK(csv.find(row) != std::string::npos);
}
