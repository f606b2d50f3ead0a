#include <doctest.h>

#include <nlohmann/json.hpp>

#include "frequc/errors.hpp"
#include "frequc/grid_model.hpp"
#include "frequc/sfr_oracle.hpp"
#include "frequc/uc_milp.hpp"
#include "small_systems.hpp"
#include "support.hpp"

using namespace frequc;
using namespace frequc::uc;
using frequc::testing::data_dir;
using frequc::testing::small_system;

namespace {

grid::PowerSystem six_bus() { return grid::load_system(data_dir() / "six_bus"); }

milp::SolveOptions exact() {
    milp::SolveOptions o;
    o.gap = 0.0;
    return o;
}

bool has_row(const milp::MilpModel& m, const std::string& prefix) {
    for (const auto& r : m.constraints())
        if (r.name.rfind(prefix, 0) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("mode names") {
    CHECK(mode_from_string("no_freq") == Mode::no_freq);
    CHECK(to_string(Mode::freq_full) == "freq_full");
    CHECK_THROWS_AS(mode_from_string("full"), ConfigError);
}

TEST_CASE("model families per mode") {
    const auto sys = six_bus();
    BuildOptions opt;
    opt.mode = Mode::no_freq;
    const auto plain = build(sys, opt);
    CHECK(has_row(plain.model, "reserve_req_t1"));
    CHECK_FALSE(has_row(plain.model, "swing"));
    CHECK_FALSE(has_row(plain.model, "nadir"));
    CHECK(plain.model.num_binaries() == 3 * 3 * 24);

    opt.mode = Mode::freq_full;
    const auto full = build(sys, opt);
    CHECK(has_row(full.model, "rocof_t1"));
    CHECK(has_row(full.model, "qss_t24"));
    CHECK(has_row(full.model, "swing_t1_s1_0"));
    CHECK(has_row(full.model, "nadir_t24_s4_7"));
    CHECK_FALSE(has_row(full.model, "reserve_req"));
    // Commitment bits plus two droop bits per hour.
    CHECK(full.model.num_binaries() == 3 * 3 * 24 + 2 * 24);
    CHECK(full.blocks.size() == 24);
    CHECK(full.grid.size() == 4);
    full.model.validate();
}

TEST_CASE("fixed binaries with no thermal inertia violate a constant row") {
    const auto sys = small_system(1);
    FixedBinaries fx;
    fx.commitment.assign(2, std::vector<int>(static_cast<std::size_t>(sys.hours), 0));
    fx.droop.assign(1, std::vector<double>(static_cast<std::size_t>(sys.hours), 10.0));
    const auto m = build_fixed(sys, {}, fx);
    CHECK_FALSE(m.violated_constant_rows.empty());
    CHECK(m.violated_constant_rows.front().rfind("rocof_t1", 0) == 0);
    CHECK_THROWS_AS(build_fixed(sys, {}, FixedBinaries{}), ConfigError);
}

TEST_CASE("MILP optimum equals enumeration on small systems") {
    auto backend = milp::make_backend();
    int feasible = 0;
    for (std::uint64_t seed = 100; seed < 104; ++seed) {
        const auto sys = small_system(seed);
        for (auto mode : {Mode::no_freq, Mode::freq_full}) {
            BuildOptions opt;
            opt.mode = mode;
            const auto milp_sol = solve(build(sys, opt), sys, *backend, exact());
            const auto bf = brute_force_small(sys, opt, *backend);
            CHECK(bf.feasible == milp_sol.has_schedule());
            if (!bf.feasible) continue;
            ++feasible;
            CHECK(milp_sol.objective == doctest::Approx(bf.objective).epsilon(1e-6));
        }
    }
    CHECK(feasible >= 4);
}

TEST_CASE("enumeration refuses large instances") {
    auto sys = small_system(1);
    sys.units.push_back(sys.units[0]);
    sys.units.back().id = "G3";
    auto backend = milp::make_backend();
    CHECK_THROWS_AS(brute_force_small(sys, {}, *backend), ConfigError);
}

TEST_CASE("six-bus schedule without frequency rows passes the audits") {
    const auto sys = six_bus();
    BuildOptions opt;
    opt.mode = Mode::no_freq;
    auto backend = milp::make_backend();
    const auto sol = solve(build(sys, opt), sys, *backend, {});
    REQUIRE(sol.has_schedule());
    const auto a = audit(sol, sys);
    CHECK(a.balance <= 1e-6);
    CHECK(a.drcc <= 1e-6);
    CHECK(a.cost <= 1e-4);
    CHECK(a.commitment.empty());

    const auto report = validate(sol, sys);
    REQUIRE(report.hours.size() == 24);
    CHECK_FALSE(report.all_pass());
    // Each hour's oracle metrics come from the scheduled units alone.
    const auto& h = report.hours[20];
    sfr::SfrScenario s;
    s.inertia = grid::total_wind_inertia(sys);
    s.damping = grid::event_params(sys, 20).damping;
    s.imbalance = grid::event_params(sys, 20).imbalance;
    s.dead_band = sys.policy.dead_band;
    s.wind_droop = sol.droop[0][20];
    for (std::size_t i = 0; i < sys.units.size(); ++i) {
        if (!sol.commitment[i][20]) continue;
        s.inertia += grid::unit_inertia(sys, sys.units[i]);
        s.governors.push_back({sys.units[i].id, sys.units[i].resp_const, sys.units[i].droop});
    }
    const auto m = sfr::metrics(sfr::simulate(s));
    CHECK(h.nadir == doctest::Approx(m.nadir_df).epsilon(1e-12));
    CHECK(h.rocof == doctest::Approx(sfr::rocof_initial(s)).epsilon(1e-12));
    CHECK(h.nadir_ok == (m.nadir_df <= sys.policy.nadir_max * 1.01));
}

TEST_CASE("solution and report JSON round trip") {
    const auto sys = small_system(7);
    BuildOptions opt;
    opt.mode = Mode::no_freq;
    auto backend = milp::make_backend();
    const auto sol = solve(build(sys, opt), sys, *backend, {});
    REQUIRE(sol.has_schedule());
    const auto report = validate(sol, sys);
    const auto j = solution_to_json(sol, &report);
    const auto back = solution_from_json(j);
    CHECK(back.commitment == sol.commitment);
    CHECK(back.mode == "no_freq");
    CHECK(back.objective == doctest::Approx(sol.objective).epsilon(1e-8));
    CHECK(back.droop == sol.droop);
    const auto rep = report_from_json(j.at("security"));
    CHECK(rep.failures() == report.failures());
    CHECK(rep.max_nadir() == doctest::Approx(report.max_nadir()).epsilon(1e-8));
    // Serialization is stable once values are at printed precision.
    const auto once = solution_to_json(back, &rep);
    const auto again = solution_from_json(once);
    const auto rep_again = report_from_json(once.at("security"));
    CHECK(solution_to_json(again, &rep_again).dump() == once.dump());
    CHECK_THROWS_AS(solution_from_json(nlohmann::json::object()), ParseError);
}

TEST_CASE("validation rejects a schedule for another system") {
    const auto sys = small_system(7);
    UcSolution empty;
    CHECK_THROWS_AS(validate(empty, sys), ValidationError);
}
