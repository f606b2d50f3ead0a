#pragma once

// Cubic Bernstein polynomial algebra on the unit interval.
//
// A segment of a continuous-time signal is stored as four coefficients
// c_0..c_3 with F(t) = sum_k c_k * C(3,k) t^k (1-t)^(3-k). Derivatives,
// integrals and upper bounds of F are all linear maps of c, which is what
// lets dynamic constraints become linear constraints on the coefficients.

#include <utility>

#include <Eigen/Dense>

namespace frequc::bernstein {

using BpCoeffs = Eigen::Vector4d;
using QuadCoeffs = Eigen::Vector3d;

/// Largest subdivision depth accepted by bound_rows().
inline constexpr int kMaxBoundDepth = 6;

/// Value of the cubic at t in [0,1]. Throws DomainError outside.
double eval(const BpCoeffs& coeffs, double t);

/// Value of a quadratic Bernstein polynomial at t in [0,1].
double eval(const QuadCoeffs& coeffs, double t);

/// Cubic basis values B_{3,0..3}(t).
Eigen::Vector4d basis(double t);

/// 3x4 matrix W with derivative(c) = W c.
const Eigen::Matrix<double, 3, 4>& derivative_matrix();

/// Exact derivative in the quadratic basis: 3 (c_{k+1} - c_k).
QuadCoeffs derivative(const BpCoeffs& coeffs);

/// Exact integral over [0,1]: mean of the coefficients.
double integral_unit(const BpCoeffs& coeffs);

/// How the quartic antiderivative is reduced back to a cubic.
enum class IntegralScheme {
    /// L2-closest cubic with the values at t=0 (zero) and t=1 (exact) pinned.
    pinned,
    /// Unconstrained L2 projection. Row 0 is nonzero, so a transcription
    /// using it does not chain segment endpoints exactly.
    l2_projection,
};

/// 4x4 matrix K with running_integral(c) = K c.
///
/// Both schemes start from the exact quartic antiderivative and are exact
/// whenever the input represents a polynomial of degree <= 2. Under the
/// default pinned scheme row 0 of K is zero.
const Eigen::Matrix4d& integral_matrix(IntegralScheme scheme = IntegralScheme::pinned);

/// Cubic approximation of t -> integral_0^t F.
BpCoeffs running_integral(const BpCoeffs& coeffs);

/// Stacked de Casteljau maps for the 2^depth dyadic sub-intervals of [0,1].
///
/// The result has 4 * 2^depth rows and 4 columns; every row is a convex
/// combination, so J c <= u elementwise implies F(t) <= u on [0,1].
/// Depth 0 is the identity. Throws ConfigError for depth outside
/// [0, kMaxBoundDepth].
Eigen::MatrixXd bound_rows(int depth);

/// Largest entry of bound_rows(depth) * c.
double hull_max(const BpCoeffs& coeffs, int depth);

/// Exact maximum of the cubic on [0,1] and its location, taken over the
/// endpoints and the real roots of the derivative.
std::pair<double, double> max_on_unit(const BpCoeffs& coeffs);

/// Split the curve at s in (0,1) into the pieces on [0,s] and [s,1], each
/// reparametrized to [0,1]. Throws DomainError outside (0,1).
std::pair<BpCoeffs, BpCoeffs> subdivide(const BpCoeffs& coeffs, double s);

}  // namespace frequc::bernstein
