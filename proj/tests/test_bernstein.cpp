#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "frequc/bernstein.hpp"
#include "frequc/errors.hpp"

using namespace frequc;
using namespace frequc::bernstein;

namespace {

constexpr int kCases = 10000;

double choose(int n, int k) {
    static const int table[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    return table[n][k];
}

// Power-basis evaluation of sum_k c_k C(3,k) t^k (1-t)^(3-k).
double eval_power(const BpCoeffs& c, double t) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += c(k) * choose(3, k) * std::pow(t, k) * std::pow(1.0 - t, 3 - k);
    return s;
}

// Bernstein coefficients of a0 + a1 t + a2 t^2 + a3 t^3.
BpCoeffs from_power(const std::array<double, 4>& a) {
    BpCoeffs c;
    for (int k = 0; k < 4; ++k) {
        c(k) = 0.0;
        for (int i = 0; i <= k; ++i) c(k) += choose(k, i) / choose(3, i) * a[static_cast<std::size_t>(i)];
    }
    return c;
}

BpCoeffs random_coeffs(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return BpCoeffs(u(rng), u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("basis matches the power form and sums to one") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> t01(0.0, 1.0);
    for (int n = 0; n < 1000; ++n) {
        const double t = t01(rng);
        CHECK(basis(t).sum() == doctest::Approx(1.0).epsilon(1e-12));
        const auto c = random_coeffs(rng);
        CHECK(eval(c, t) == doctest::Approx(eval_power(c, t)).epsilon(1e-12));
    }
}

TEST_CASE("endpoint interpolation is exact") {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 100; ++n) {
        const auto c = random_coeffs(rng);
        CHECK(eval(c, 0.0) == c(0));
        CHECK(eval(c, 1.0) == c(3));
    }
}

TEST_CASE("evaluation outside the unit interval is rejected") {
    CHECK_THROWS_AS(eval(BpCoeffs(BpCoeffs::Zero()), -0.1), DomainError);
    CHECK_THROWS_AS(eval(BpCoeffs(BpCoeffs::Zero()), 1.5), DomainError);
    CHECK_THROWS_AS(eval(BpCoeffs(BpCoeffs::Zero()), std::nan("")), DomainError);
    CHECK_THROWS_AS(subdivide(BpCoeffs::Zero(), 0.0), DomainError);
}

TEST_CASE("derivative agrees with a central difference") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> tin(1e-3, 1.0 - 1e-3);
    const double h = 1e-6;
    for (int n = 0; n < kCases; ++n) {
        const auto c = random_coeffs(rng);
        const double t = tin(rng);
        const double fd = (eval(c, t + h) - eval(c, t - h)) / (2.0 * h);
        const double exact = eval(derivative(c), t);
        CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
        const QuadCoeffs via_w = derivative_matrix() * c;
        CHECK((via_w - derivative(c)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("running integral is exact for quadratics") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (auto scheme : {IntegralScheme::pinned, IntegralScheme::l2_projection}) {
        for (int n = 0; n < kCases; ++n) {
            const std::array<double, 4> q{u(rng), u(rng), u(rng), 0.0};
            const std::array<double, 4> anti{0.0, q[0], q[1] / 2.0, q[2] / 3.0};
            const BpCoeffs got = integral_matrix(scheme) * from_power(q);
            CHECK((got - from_power(anti)).lpNorm<Eigen::Infinity>() < 1e-12);
        }
    }
}

TEST_CASE("pinned integral matrix keeps both endpoints") {
    std::mt19937_64 rng(5);
    const auto& k = integral_matrix();
    CHECK(k.row(0).norm() == 0.0);
    for (int c = 0; c < 4; ++c) CHECK(k(3, c) == doctest::Approx(0.25).epsilon(1e-15));
    for (int n = 0; n < 1000; ++n) {
        const auto c = random_coeffs(rng);
        const auto r = running_integral(c);
        CHECK(eval(r, 0.0) == 0.0);
        CHECK(eval(r, 1.0) == doctest::Approx(integral_unit(c)).epsilon(1e-12));
    }
    CHECK(integral_matrix(IntegralScheme::l2_projection).row(0).norm() > 1e-3);
}

TEST_CASE("integral_unit is the exact mean") {
    std::mt19937_64 rng(6);
    for (int n = 0; n < 200; ++n) {
        const auto c = random_coeffs(rng);
        // Composite Simpson on a cubic is exact.
        const int m = 64;
        double s = eval(c, 0.0) + eval(c, 1.0);
        for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * eval(c, static_cast<double>(i) / m);
        CHECK(integral_unit(c) == doctest::Approx(s / (3.0 * m)).epsilon(1e-12));
    }
}

TEST_CASE("bound rows are sound and tighten with depth") {
    std::mt19937_64 rng(7);
    for (int d = 0; d <= 3; ++d) {
        const auto j = bound_rows(d);
        CHECK(j.rows() == 4 * (1 << d));
        CHECK(j.cols() == 4);
        for (Eigen::Index r = 0; r < j.rows(); ++r) {
            CHECK(j.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(j.row(r).minCoeff() >= 0.0);
        }
    }
    for (int n = 0; n < kCases; ++n) {
        const auto c = random_coeffs(rng);
        double sampled = -1e300;
        for (int i = 0; i <= 200; ++i) sampled = std::max(sampled, eval(c, i / 200.0));
        double previous = 1e300;
        for (int d = 0; d <= 3; ++d) {
            const double u = hull_max(c, d);
            CHECK(sampled <= u + 1e-12);
            CHECK(u <= previous + 1e-12);
            previous = u;
        }
    }
    CHECK_THROWS_AS(bound_rows(-1), ConfigError);
    CHECK_THROWS_AS(bound_rows(kMaxBoundDepth + 1), ConfigError);
}

TEST_CASE("subdivision reproduces the curve") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> s01(0.05, 0.95);
    for (int n = 0; n < 500; ++n) {
        const auto c = random_coeffs(rng);
        const double s = s01(rng);
        const auto [left, right] = subdivide(c, s);
        for (double t : {0.0, 0.3, 0.7, 1.0}) {
            CHECK(eval(left, t) == doctest::Approx(eval(c, s * t)).epsilon(1e-12));
            CHECK(eval(right, t) == doctest::Approx(eval(c, s + (1.0 - s) * t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("max_on_unit finds the dense-sample maximum") {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 1000; ++n) {
        const auto c = random_coeffs(rng);
        const auto [value, at] = max_on_unit(c);
        double sampled = -1e300;
        for (int i = 0; i <= 10000; ++i) sampled = std::max(sampled, eval(c, i / 10000.0));
        CHECK(value >= sampled - 1e-12);
        CHECK(value <= sampled + 1e-6);
        CHECK(eval(c, at) == doctest::Approx(value).epsilon(1e-12));
    }
}
