#include <doctest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "frequc/bernstein.hpp"
#include "frequc/errors.hpp"
#include "frequc/freq_algebra.hpp"
#include "frequc/sfr_oracle.hpp"
#include "support.hpp"

using namespace frequc;
using namespace frequc::freq;
using frequc::testing::data_dir;
using milp::LinExpr;
using milp::MilpModel;
using milp::Sense;

namespace {

sfr::SfrScenario all_online() {
    std::ifstream in(data_dir() / "scenarios" / "all_online.json");
    return sfr::scenario_from_json(nlohmann::json::parse(in));
}

const SegmentGrid kUneven = SegmentGrid::from_fractions(30.0, {0.1, 0.2, 0.3, 0.4});

// One-hour MILP block for a scenario with every unit binary and the wind
// droop bits created but left to the caller.
struct Block {
    MilpModel model;
    FreqBlock block;
    HourTerms terms;
};

Block build_block(const sfr::SfrScenario& s, const SegmentGrid& grid, double wind_min, double wind_max,
                  double wind_step, double big_m) {
    Block b;
    b.terms.imbalance = s.imbalance;
    b.terms.damping = s.damping;
    b.terms.dead_band = s.dead_band;
    b.terms.big_m = big_m;
    // The scenario inertia is split evenly between units and one farm.
    const double share = s.inertia / static_cast<double>(s.governors.size() + 1);
    for (const auto& g : s.governors)
        b.terms.units.push_back({g.name, b.model.add_binary("I_" + g.name), share, g.response_time, g.droop});
    b.terms.farms.push_back({"W", share, expand_droop(b.model, "Gw", wind_min, wind_max, wind_step, 0)});
    b.block = transcribe_dynamics(b.model, b.terms, grid);
    return b;
}

void fix_droop(MilpModel& m, const DroopExpansion& d, double value) {
    const long code = std::lround((value - d.offset) / d.step);
    for (int k = 0; k < d.num_bits(); ++k) m.fix(d.bits[k], static_cast<double>(code >> k & 1));
}

}  // namespace

TEST_CASE("segment grids") {
    const auto g = SegmentGrid::even(30.0, 4);
    CHECK(g.size() == 4);
    CHECK(g.horizon() == doctest::Approx(30.0));
    CHECK(kUneven.boundaries() == std::vector<double>{0.0, 3.0, 9.0, 18.0, 30.0});
    CHECK_THROWS_AS(SegmentGrid::even(30.0, 0), ConfigError);
    CHECK_THROWS_AS(SegmentGrid::from_fractions(30.0, {0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(SegmentGrid::from_fractions(30.0, {1.5, -0.5}), ConfigError);
    CHECK_THROWS_AS(SegmentGrid{}.validate(), ConfigError);
}

TEST_CASE("RoCoF and QSS rows") {
    MilpModel m;
    const auto i = m.add_binary("i");
    const auto rocof = rocof_constraint(LinExpr(8.0) + LinExpr::var(i, 32.0), 21.0, 0.5);
    CHECK(rocof.sense == Sense::ge);
    CHECK(rocof.rhs == 21.0);
    CHECK(rocof.expr.evaluate({1.0}) == doctest::Approx(40.0));
    const auto qss = qss_constraint(LinExpr::var(i, 40.0), 2.1, 0.015, 0.3, 21.0);
    // (0.3 - 0.015) * 40 >= 21 - 2.1 * 0.3
    CHECK(qss.expr.evaluate({1.0}) == doctest::Approx(11.4));
    CHECK(qss.rhs == doctest::Approx(20.37));
    CHECK_THROWS_AS(qss_constraint(LinExpr::var(i), 2.1, 0.3, 0.3, 21.0), ConfigError);
}

TEST_CASE("droop expansion admits exactly the grid levels") {
    CHECK(droop_bits(10, 25, 5) == 2);
    CHECK(droop_bits(10, 30, 5) == 3);
    CHECK(droop_bits(10, 10, 5) == 0);

    MilpModel m;
    const auto e = expand_droop(m, "g", 10.0, 30.0, 5.0, 0);
    CHECK(e.levels() == std::vector<double>{10, 15, 20, 25, 30});
    CHECK(m.num_constraints() == 1);  // cap row: codes 5..7 exceed 30
    for (int code = 0; code < 8; ++code) {
        std::vector<double> v(3);
        for (int k = 0; k < 3; ++k) v[k] = code >> k & 1;
        CHECK(e.value(v) == 10.0 + 5.0 * code);
        CHECK((m.max_violation(v) == 0.0) == (code <= 4));
    }
}

TEST_CASE("big-M rows force alpha = b * x") {
    for (int b = 0; b <= 1; ++b) {
        for (double x : {0.0, 0.2, 0.5}) {
            for (double dir : {1.0, -1.0}) {
                MilpModel m;
                const auto bin = m.add_binary("b");
                m.fix(bin, b);
                Coeffs xs{};
                for (int k = 0; k < 4; ++k) {
                    xs[k] = m.add_var("x" + std::to_string(k), 0.0, 0.5);
                    m.fix(xs[k], x);
                }
                const auto a = linearize_products(m, "a", bin, xs, 0.5, {});
                m.set_objective(LinExpr::var(a[2], dir));
                const auto r = milp::make_backend()->solve(m, {});
                REQUIRE(r.has_solution());
                CHECK(r.values[static_cast<std::size_t>(a[2])] == doctest::Approx(b * x).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("fixed-binary spline tracks the oracle on the uneven grid") {
    const auto s = all_online();
    const auto spline = solve_fixed(s, kUneven);
    const auto traj = sfr::simulate(s);
    const double nadir = sfr::metrics(traj).nadir_df;
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double tau = traj.t[i] - *traj.t_db;
        if (tau < 0.0 || tau > kUneven.horizon()) continue;
        worst = std::max(worst, std::abs(spline.df_at(tau) - traj.df[i]));
    }
    CHECK(worst <= 0.01 * nadir);
    CHECK(std::abs(spline.nadir().first - nadir) <= 0.001 * nadir);
}

TEST_CASE("segments chain continuously") {
    const auto s = all_online();
    for (int n : {2, 4, 8}) {
        const auto spline = solve_fixed(s, SegmentGrid::even(30.0, n));
        CHECK(spline.df.front()(0) == doctest::Approx(s.dead_band).epsilon(1e-12));
        for (std::size_t k = 1; k < spline.df.size(); ++k) {
            CHECK(std::abs(spline.df[k](0) - spline.df[k - 1](3)) <= 1e-9);
            for (std::size_t g = 0; g < spline.pfr_g.size(); ++g)
                CHECK(std::abs(spline.pfr_g[g][k](0) - spline.pfr_g[g][k - 1](3)) <= 1e-9);
        }
    }
}

TEST_CASE("MILP transcription with fixed binaries equals the direct solve") {
    const auto s = all_online();
    auto b = build_block(s, kUneven, 10.0, 25.0, 5.0, 0.5);
    for (const auto& u : b.terms.units) b.model.fix(u.commit, 1.0);
    fix_droop(b.model, b.terms.farms[0].droop, s.wind_droop);
    const auto r = milp::make_backend()->solve(b.model, {});
    REQUIRE(r.status == milp::SolveStatus::optimal);
    const auto direct = solve_fixed(s, kUneven);
    for (int seg = 0; seg < kUneven.size(); ++seg)
        for (int k = 0; k < 4; ++k)
            CHECK(r.values[static_cast<std::size_t>(b.block.df[seg][k])] ==
                  doctest::Approx(direct.df[seg](k)).epsilon(1e-6));
}

TEST_CASE("offline units drop out of the transcription") {
    auto s = all_online();
    auto b = build_block(s, kUneven, 10.0, 25.0, 5.0, 2.0);
    b.model.fix(b.terms.units[0].commit, 0.0);
    for (std::size_t i = 1; i < b.terms.units.size(); ++i) b.model.fix(b.terms.units[i].commit, 1.0);
    fix_droop(b.model, b.terms.farms[0].droop, 20.0);
    const auto r = milp::make_backend()->solve(b.model, {});
    REQUIRE(r.status == milp::SolveStatus::optimal);

    const double share = s.inertia / 4.0;
    s.inertia = 3.0 * share;
    s.governors.erase(s.governors.begin());
    s.wind_droop = 20.0;
    const auto direct = solve_fixed(s, kUneven);
    for (int seg = 0; seg < kUneven.size(); ++seg) {
        for (int k = 0; k < 4; ++k) {
            CHECK(r.values[static_cast<std::size_t>(b.block.df[seg][k])] ==
                  doctest::Approx(direct.df[seg](k)).epsilon(1e-6));
            CHECK(std::abs(r.values[static_cast<std::size_t>(b.block.pfr_g[0][seg][k])]) <= 1e-7);
        }
    }
}

TEST_CASE("nadir rows are an inner approximation") {
    const auto s = all_online();
    const auto direct = solve_fixed(s, kUneven);
    for (int depth = 0; depth <= 2; ++depth) {
        const auto j = bernstein::bound_rows(depth);
        const double hull = direct.nadir_hull(depth);
        for (double limit : {hull * 1.0001, direct.nadir().first * 0.999}) {
            auto b = build_block(s, kUneven, 10.0, 25.0, 5.0, 0.5);
            for (const auto& u : b.terms.units) b.model.fix(u.commit, 1.0);
            fix_droop(b.model, b.terms.farms[0].droop, s.wind_droop);
            nadir_bound(b.model, b.block, j, limit);
            const auto r = milp::make_backend()->solve(b.model, {});
            if (!r.has_solution()) {
                CHECK(limit < hull);
                continue;
            }
            CHECK(limit >= direct.nadir().first);
            for (int seg = 0; seg < kUneven.size(); ++seg) {
                bernstein::BpCoeffs c;
                for (int k = 0; k < 4; ++k) c(k) = r.values[static_cast<std::size_t>(b.block.df[seg][k])];
                for (int i = 0; i <= 1000; ++i) CHECK(bernstein::eval(c, i / 1000.0) <= limit + 1e-9);
            }
        }
    }
}

TEST_CASE("optimized commitment keeps every product consistent with its bit") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> limit(0.3, 0.5);
    const auto s = all_online();
    for (int n = 0; n < 6; ++n) {
        auto b = build_block(s, kUneven, 10.0, 25.0, 5.0, 0.5);
        nadir_bound(b.model, b.block, bernstein::bound_rows(1), limit(rng));
        LinExpr cost;
        for (std::size_t i = 0; i < b.terms.units.size(); ++i) cost.add(b.terms.units[i].commit, 100.0 + 10.0 * i);
        cost += b.terms.farms[0].droop.expr();
        b.model.set_objective(cost);
        const auto r = milp::make_backend()->solve(b.model, {});
        if (!r.has_solution()) continue;
        for (std::size_t i = 0; i < b.terms.units.size(); ++i) {
            const double on = std::round(r.values[static_cast<std::size_t>(b.terms.units[i].commit)]);
            for (int seg = 0; seg < kUneven.size(); ++seg)
                for (int k = 0; k < 4; ++k)
                    CHECK(r.values[static_cast<std::size_t>(b.block.commit_df[i][seg][k])] ==
                          doctest::Approx(on * r.values[static_cast<std::size_t>(b.block.df[seg][k])])
                              .epsilon(1e-6));
        }
        const auto& d = b.terms.farms[0].droop;
        for (int k = 0; k < d.num_bits(); ++k) {
            const double bit = std::round(r.values[static_cast<std::size_t>(d.bits[k])]);
            for (int seg = 0; seg < kUneven.size(); ++seg)
                for (int c = 0; c < 4; ++c)
                    CHECK(r.values[static_cast<std::size_t>(b.block.bit_df[0][k][seg][c])] ==
                          doctest::Approx(bit * r.values[static_cast<std::size_t>(b.block.df[seg][c])])
                              .epsilon(1e-6));
        }
    }
}

TEST_CASE("reserve rows bound every segment") {
    const auto s = all_online();
    auto b = build_block(s, kUneven, 10.0, 25.0, 5.0, 0.5);
    for (const auto& u : b.terms.units) b.model.fix(u.commit, 1.0);
    fix_droop(b.model, b.terms.farms[0].droop, s.wind_droop);
    std::vector<milp::VarId> ru, rw{b.model.add_var("Rw", 0.0, 1e9)};
    LinExpr total = LinExpr::var(rw[0]);
    for (const auto& u : b.terms.units) {
        ru.push_back(b.model.add_var("R_" + u.id, 0.0, 1e9));
        total.add(ru.back(), 1.0);
    }
    reserve_bound(b.model, b.block, bernstein::bound_rows(0), ru, rw);
    b.model.set_objective(total);
    const auto r = milp::make_backend()->solve(b.model, {});
    REQUIRE(r.has_solution());
    const auto direct = solve_fixed(s, kUneven);
    for (std::size_t i = 0; i < ru.size(); ++i) {
        double peak = 0.0;
        for (const auto& c : direct.pfr_g[i]) peak = std::max(peak, c.maxCoeff());
        CHECK(r.values[static_cast<std::size_t>(ru[i])] == doctest::Approx(peak).epsilon(1e-6));
    }
    CHECK_THROWS_AS(reserve_bound(b.model, b.block, bernstein::bound_rows(0), {}, rw), ConfigError);
}
