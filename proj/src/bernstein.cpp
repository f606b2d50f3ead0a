#include "frequc/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "frequc/errors.hpp"

namespace frequc::bernstein {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// integral_0^1 B_{m,i} B_{n,j}
double gram(int m, int i, int n, int j) {
    return binomial(m, i) * binomial(n, j) / ((m + n + 1) * binomial(m + n, i + j));
}

void check_unit(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("Bernstein evaluation point " + std::to_string(t) +
                          " outside [0,1]");
    }
}

Eigen::Matrix4d build_integral_matrix(IntegralScheme scheme) {
    // Exact antiderivative in the quartic basis:
    // integral_0^t B_{3,k} = (1/4) sum_{j>k} B_{4,j}, so a_j = (1/4) sum_{k<j} c_k.
    Eigen::Matrix<double, 5, 4> quartic = Eigen::Matrix<double, 5, 4>::Zero();
    for (int j = 0; j < 5; ++j)
        for (int k = 0; k < j && k < 4; ++k) quartic(j, k) = 0.25;

    Eigen::Matrix4d g33;
    Eigen::Matrix<double, 4, 5> g34;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) g33(i, j) = gram(3, i, 3, j);
        for (int j = 0; j < 5; ++j) g34(i, j) = gram(3, i, 4, j);
    }

    if (scheme == IntegralScheme::l2_projection) {
        return g33.fullPivLu().solve(g34 * quartic);
    }

    // b_0 = a_0 = 0 and b_3 = a_4 are pinned; b_1, b_2 solve the L2 normal
    // equations restricted to the free indices.
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    k.row(3) = quartic.row(4);
    Eigen::Matrix2d lhs;
    lhs << g33(1, 1), g33(1, 2), g33(2, 1), g33(2, 2);
    Eigen::Matrix<double, 2, 4> rhs;
    for (int r = 0; r < 2; ++r) {
        const int i = r + 1;
        rhs.row(r) = g34.row(i) * quartic - g33(i, 3) * k.row(3);
    }
    Eigen::Matrix<double, 2, 4> free = lhs.fullPivLu().solve(rhs);
    k.row(1) = free.row(0);
    k.row(2) = free.row(1);
    return k;
}

// De Casteljau maps at s as 4x4 matrices: left = SL c, right = SR c.
std::pair<Eigen::Matrix4d, Eigen::Matrix4d> split_maps(double s) {
    Eigen::Matrix4d left, right;
    for (int col = 0; col < 4; ++col) {
        BpCoeffs unit = BpCoeffs::Zero();
        unit(col) = 1.0;
        auto [l, r] = subdivide(unit, s);
        left.col(col) = l;
        right.col(col) = r;
    }
    return {left, right};
}

}  // namespace

Eigen::Vector4d basis(double t) {
    check_unit(t);
    const double u = 1.0 - t;
    return {u * u * u, 3.0 * t * u * u, 3.0 * t * t * u, t * t * t};
}

double eval(const BpCoeffs& coeffs, double t) { return coeffs.dot(basis(t)); }

double eval(const QuadCoeffs& coeffs, double t) {
    check_unit(t);
    const double u = 1.0 - t;
    return coeffs(0) * u * u + coeffs(1) * 2.0 * t * u + coeffs(2) * t * t;
}

const Eigen::Matrix<double, 3, 4>& derivative_matrix() {
    static const Eigen::Matrix<double, 3, 4> w = [] {
        Eigen::Matrix<double, 3, 4> m = Eigen::Matrix<double, 3, 4>::Zero();
        for (int k = 0; k < 3; ++k) {
            m(k, k) = -3.0;
            m(k, k + 1) = 3.0;
        }
        return m;
    }();
    return w;
}

QuadCoeffs derivative(const BpCoeffs& coeffs) { return derivative_matrix() * coeffs; }

double integral_unit(const BpCoeffs& coeffs) { return coeffs.sum() / 4.0; }

const Eigen::Matrix4d& integral_matrix(IntegralScheme scheme) {
    static const Eigen::Matrix4d pinned = build_integral_matrix(IntegralScheme::pinned);
    static const Eigen::Matrix4d projected =
        build_integral_matrix(IntegralScheme::l2_projection);
    return scheme == IntegralScheme::pinned ? pinned : projected;
}

BpCoeffs running_integral(const BpCoeffs& coeffs) { return integral_matrix() * coeffs; }

std::pair<BpCoeffs, BpCoeffs> subdivide(const BpCoeffs& coeffs, double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw DomainError("subdivision point " + std::to_string(s) + " outside (0,1)");
    }
    const double u = 1.0 - s;
    const double p01 = u * coeffs(0) + s * coeffs(1);
    const double p12 = u * coeffs(1) + s * coeffs(2);
    const double p23 = u * coeffs(2) + s * coeffs(3);
    const double p012 = u * p01 + s * p12;
    const double p123 = u * p12 + s * p23;
    const double mid = u * p012 + s * p123;
    return {BpCoeffs(coeffs(0), p01, p012, mid), BpCoeffs(mid, p123, p23, coeffs(3))};
}

Eigen::MatrixXd bound_rows(int depth) {
    if (depth < 0 || depth > kMaxBoundDepth) {
        throw ConfigError("bound depth " + std::to_string(depth) + " outside [0," +
                          std::to_string(kMaxBoundDepth) + "]");
    }
    static const std::vector<Eigen::MatrixXd> cache = [] {
        const auto halves = split_maps(0.5);
        std::vector<Eigen::MatrixXd> out;
        std::vector<Eigen::Matrix4d> pieces{Eigen::Matrix4d::Identity()};
        for (int level = 0; level <= kMaxBoundDepth; ++level) {
            Eigen::MatrixXd j(4 * static_cast<Eigen::Index>(pieces.size()), 4);
            for (std::size_t i = 0; i < pieces.size(); ++i)
                j.middleRows(4 * static_cast<Eigen::Index>(i), 4) = pieces[i];
            out.push_back(std::move(j));
            std::vector<Eigen::Matrix4d> next;
            next.reserve(pieces.size() * 2);
            for (const auto& p : pieces) {
                next.push_back(halves.first * p);
                next.push_back(halves.second * p);
            }
            pieces = std::move(next);
        }
        return out;
    }();
    return cache[static_cast<std::size_t>(depth)];
}

double hull_max(const BpCoeffs& coeffs, int depth) {
    return (bound_rows(depth) * coeffs).maxCoeff();
}

std::pair<double, double> max_on_unit(const BpCoeffs& coeffs) {
    std::vector<double> candidates{0.0, 1.0};
    // Derivative in power form: d(t) = q0 (1-t)^2 + 2 q1 t (1-t) + q2 t^2
    //                              = a t^2 + b t + c
    const QuadCoeffs q = derivative(coeffs);
    const double a = q(0) - 2.0 * q(1) + q(2);
    const double b = 2.0 * (q(1) - q(0));
    const double c = q(0);
    const double scale = q.cwiseAbs().maxCoeff();
    if (std::abs(a) <= 1e-14 * scale) {
        if (std::abs(b) > 1e-14 * scale) candidates.push_back(-c / b);
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            // Numerically stable quadratic roots.
            const double root = std::sqrt(disc);
            const double qq = -0.5 * (b + std::copysign(root, b));
            if (qq != 0.0) candidates.push_back(c / qq);
            candidates.push_back(qq / a);
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    double where = 0.0;
    for (double t : candidates) {
        if (!(t >= 0.0 && t <= 1.0)) continue;
        const double v = eval(coeffs, t);
        if (v > best) {
            best = v;
            where = t;
        }
    }
    return {best, where};
}

}  // namespace frequc::bernstein
