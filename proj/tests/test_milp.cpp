#include <doctest.h>

#include <limits>
#include <random>

#include "frequc/errors.hpp"
#include "frequc/milp.hpp"

using namespace frequc;
using namespace frequc::milp;

TEST_CASE("rows merge repeated variables and move constants") {
    MilpModel m;
    const auto x = m.add_var("x", 0.0, 10.0);
    const auto y = m.add_var("y", 0.0, 10.0);
    LinExpr e = LinExpr::var(y, 2.0) + LinExpr::var(x) + LinExpr::var(y, -2.0) + LinExpr(3.0);
    e.add(x, 1.0);
    m.add_constraint("r", e, Sense::le, 7.0);
    const auto& row = m.constraints().front();
    REQUIRE(row.terms.size() == 1);
    CHECK(row.terms[0].first == x);
    CHECK(row.terms[0].second == 2.0);
    CHECK(row.rhs == 4.0);
}

TEST_CASE("small LP optimum") {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3 -> (3, 1), value 11.
    MilpModel m;
    const auto x = m.add_var("x", 0.0, 3.0);
    const auto y = m.add_var("y", 0.0, std::numeric_limits<double>::infinity());
    m.add_constraint("a", LinExpr::var(x) + LinExpr::var(y), Sense::le, 4.0);
    m.add_constraint("b", LinExpr::var(x) + LinExpr::var(y, 3.0), Sense::le, 6.0);
    m.set_objective(LinExpr::var(x, -3.0) + LinExpr::var(y, -2.0));
    const auto r = make_backend("highs")->solve(m, {});
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.objective == doctest::Approx(-11.0));
    CHECK(r.values[0] == doctest::Approx(3.0));
    CHECK(r.values[1] == doctest::Approx(1.0));
    CHECK(m.max_violation(r.values) <= 1e-9);
}

TEST_CASE("random knapsacks match enumeration") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> w(1.0, 10.0), v(1.0, 20.0);
    for (int n = 0; n < 20; ++n) {
        const int items = 10;
        std::vector<double> weight(items), value(items);
        MilpModel m;
        LinExpr load, obj;
        for (int i = 0; i < items; ++i) {
            weight[i] = w(rng);
            value[i] = v(rng);
            const auto b = m.add_binary("b" + std::to_string(i));
            load.add(b, weight[i]);
            obj.add(b, -value[i]);
        }
        const double cap = 25.0;
        m.add_constraint("cap", load, Sense::le, cap);
        m.set_objective(obj);
        SolveOptions opt;
        opt.gap = 0.0;
        const auto r = make_backend()->solve(m, opt);
        REQUIRE(r.status == SolveStatus::optimal);

        double best = 0.0;
        for (int mask = 0; mask < (1 << items); ++mask) {
            double wt = 0.0, val = 0.0;
            for (int i = 0; i < items; ++i)
                if (mask >> i & 1) {
                    wt += weight[i];
                    val += value[i];
                }
            if (wt <= cap) best = std::max(best, val);
        }
        CHECK(-r.objective == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("infeasible model reports no solution") {
    MilpModel m;
    const auto x = m.add_binary("x");
    m.add_constraint("r", LinExpr::var(x), Sense::ge, 2.0);
    const auto r = make_backend()->solve(m, {});
    CHECK(r.status == SolveStatus::infeasible);
    CHECK_FALSE(r.has_solution());
}

TEST_CASE("equality and fixed variables") {
    MilpModel m;
    const auto x = m.add_var("x", 0.0, 10.0);
    const auto y = m.add_var("y", 0.0, 10.0);
    m.fix(y, 2.5);
    m.add_constraint("sum", LinExpr::var(x) + LinExpr::var(y), Sense::eq, 7.0);
    m.set_objective(LinExpr::var(x));
    const auto r = make_backend()->solve(m, {});
    REQUIRE(r.has_solution());
    CHECK(r.values[0] == doctest::Approx(4.5));
}

TEST_CASE("model validation") {
    MilpModel m;
    m.add_var("x", 0.0, 1.0);
    m.add_var("x", 0.0, 1.0);
    CHECK_THROWS_AS(m.validate(), ValidationError);

    MilpModel bounds;
    bounds.add_var("x", 2.0, 1.0);
    CHECK_THROWS_AS(bounds.validate(), ValidationError);

    MilpModel missing;
    missing.add_var("x", 0.0, 1.0);
    missing.add_constraint("r", LinExpr::var(5), Sense::le, 1.0);
    CHECK_THROWS_AS(missing.validate(), ValidationError);
    CHECK(missing.find("x") == 0);
    CHECK(missing.find("nope") == -1);

    CHECK_THROWS_AS(make_backend("cplex"), ConfigError);
}

TEST_CASE("max_violation measures rows, bounds and integrality") {
    MilpModel m;
    const auto b = m.add_binary("b");
    const auto x = m.add_var("x", 0.0, 5.0);
    m.add_constraint("r", LinExpr::var(b) + LinExpr::var(x), Sense::ge, 3.0);
    CHECK(m.max_violation({1.0, 2.0}) == 0.0);
    CHECK(m.max_violation({0.5, 2.5}) == doctest::Approx(0.5));
    CHECK(m.max_violation({1.0, 1.0}) == doctest::Approx(1.0));
    CHECK(m.max_violation({0.0, 7.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(m.max_violation({0.0}), DomainError);
}
