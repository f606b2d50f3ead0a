#include <doctest.h>

#include <cmath>
#include <random>

#include "frequc/errors.hpp"
#include "frequc/risk.hpp"

using namespace frequc;
using namespace frequc::risk;

namespace {

// Upper quantile by bisection on erfc.
double bisect_quantile(double eps) {
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(mid / std::sqrt(2.0)) > eps ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile matches bisection") {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5})
        CHECK(normal_upper_quantile(eps) == doctest::Approx(bisect_quantile(eps)).epsilon(1e-12));
    CHECK(normal_upper_quantile(0.5) == 0.0);
}

TEST_CASE("gaussian threshold holds with probability 1 - eps") {
    const double mu = 40.0, sigma = 2.0, eps = 0.1;
    const double cp = risk_coefficient(eps, 0.0, sigma, Strategy::gaussian);
    const double th = drcc_threshold(mu, sigma, cp).value;
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> draw(mu, sigma);
    const int n = 1000000;
    int short_fall = 0;
    for (int i = 0; i < n; ++i) short_fall += draw(rng) < th;
    CHECK(static_cast<double>(short_fall) / n <= eps + 0.002);
}

TEST_CASE("coefficient is monotone in eps and radius") {
    for (auto strategy : {Strategy::gaussian, Strategy::wasserstein_cvar}) {
        double previous = 1e300;
        for (double eps = 0.01; eps <= 0.5; eps += 0.01) {
            const double cp = risk_coefficient(eps, 0.01, 2.0, strategy);
            CHECK(cp <= previous + 1e-12);
            CHECK(cp >= 0.0);
            previous = cp;
        }
        previous = -1.0;
        for (double r = 0.0; r <= 1.0; r += 0.05) {
            const double cp = risk_coefficient(0.1, r, 2.0, strategy);
            CHECK(cp >= previous - 1e-12);
            previous = cp;
        }
    }
}

TEST_CASE("the CVaR bound is at least as conservative as the gaussian one") {
    for (double r : {0.0, 0.01, 0.1, 1.0})
        for (double eps : {0.05, 0.1, 0.3})
            CHECK(drcc_threshold(50.0, 2.5, risk_coefficient(eps, r, 2.5, Strategy::wasserstein_cvar)).value <=
                  drcc_threshold(50.0, 2.5, risk_coefficient(eps, r, 2.5, Strategy::gaussian)).value);
}

TEST_CASE("fixed strategy passes the coefficient through") {
    CHECK(risk_coefficient(0.1, 0.0, 1.0, Strategy::fixed, 1.7) == 1.7);
    CHECK_THROWS_AS(risk_coefficient(0.1, 0.0, 1.0, Strategy::fixed), ConfigError);
    CHECK_THROWS_AS(risk_coefficient(0.1, 0.0, 1.0, Strategy::fixed, -1.0), DomainError);
}

TEST_CASE("threshold clips at zero") {
    const auto t = drcc_threshold(1.0, 2.0, 1.28);
    CHECK(t.value == 0.0);
    CHECK(t.clipped);
    CHECK_FALSE(drcc_threshold(10.0, 1.0, 1.0).clipped);
}

TEST_CASE("bad risk inputs") {
    CHECK_THROWS_AS(risk_coefficient(0.0, 0.0, 1.0, Strategy::gaussian), DomainError);
    CHECK_THROWS_AS(risk_coefficient(0.6, 0.0, 1.0, Strategy::gaussian), DomainError);
    CHECK_THROWS_AS(risk_coefficient(0.1, -1.0, 1.0, Strategy::gaussian), DomainError);
    CHECK_THROWS_AS(risk_coefficient(0.1, 0.1, 0.0, Strategy::wasserstein_cvar), DomainError);
    CHECK_THROWS_AS(strategy_from_string("exact"), ConfigError);
    CHECK(strategy_from_string(to_string(Strategy::wasserstein_cvar)) == Strategy::wasserstein_cvar);
}
