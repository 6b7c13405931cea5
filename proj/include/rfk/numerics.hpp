#pragma once

// Small quadrature and interpolation toolkit shared by the geometry,
// radial and transplantation modules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rfk/common.hpp"

namespace rfk::numerics {

namespace detail {
// 5-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 5> kGaussNodes{
    -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0, 0.5384693101056830910363144,
    0.9061798459386639927976269};
inline constexpr std::array<double, 5> kGaussWeights{
    0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
    0.4786286704993664680412915, 0.2369268850561890875142640};

template <class F>
double gauss5(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) s += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
    return s * half;
}

template <class F>
double adaptive_gauss_rec(F& f, double a, double b, double whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss5(f, a, mid);
    const double right = gauss5(f, mid, b);
    const double refined = left + right;
    // The 4 ulp floor keeps roundoff from forcing recursion to full depth.
    if (depth <= 0 || std::abs(refined - whole) <= std::max(tol, 1e-15 * std::abs(refined))) return refined;
    return adaptive_gauss_rec(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive_gauss_rec(f, mid, b, right, 0.5 * tol, depth - 1);
}

template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= std::max(15.0 * tol, 1e-15 * std::abs(left + right)))
        return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

/// Adaptive 5-point Gauss-Legendre quadrature with interval bisection.
/// Open rule: the integrand is never evaluated at a or b.
template <class F>
double integrate_gauss(F&& f, double a, double b, double abs_tol = 1e-14, int max_depth = 24) {
    if (b <= a) return 0.0;
    return detail::adaptive_gauss_rec(f, a, b, detail::gauss5(f, a, b), abs_tol, max_depth);
}

/// Same as integrate_gauss but splits at the given interior breakpoints first.
template <class F>
double integrate_gauss_split(F&& f, double a, double b, std::span<const double> breaks, double abs_tol = 1e-14) {
    if (b <= a) return 0.0;
    double total = 0.0;
    double lo = a;
    for (double x : breaks) {
        if (x > lo && x < b) {
            total += integrate_gauss(f, lo, x, abs_tol);
            lo = x;
        }
    }
    return total + integrate_gauss(f, lo, b, abs_tol);
}

/// Classic adaptive Simpson with Richardson correction.
template <class F>
double integrate_simpson(F&& f, double a, double b, double abs_tol = 1e-12, int max_depth = 50) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

/// Running composite-trapezoid integral; out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

/// Composite Simpson on a uniform grid with an odd number of samples.
double simpson_uniform(std::span<const double> y, double step);

/// Uniform grid of n points on [a, b], endpoints exact.
std::vector<double> linspace(double a, double b, std::size_t n);

/// Piecewise-linear interpolant over nondecreasing knots. Evaluation clamps
/// to the end values outside the knot range; inversion assumes monotone values.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    /// Smallest abscissa with value == target for nondecreasing values, or
    /// largest for nonincreasing ones; clamps outside the value range.
    double inverse(double target) const;

    std::span<const double> x() const { return x_; }
    std::span<const double> y() const { return y_; }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

/// Cubic Hermite interpolation on [x0, x1].
inline double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double t) {
    const double h = x1 - x0;
    const double s = (t - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

/// |x|^q with the convention 0^q = 0 for q > 0.
inline double abs_pow(double x, double q) {
    const double a = std::abs(x);
    return a == 0.0 ? 0.0 : std::pow(a, q);
}

/// sign(x)|x|^q
inline double signed_pow(double x, double q) {
    if (x == 0.0) return 0.0;
    return x > 0.0 ? std::pow(x, q) : -std::pow(-x, q);
}

} // namespace rfk::numerics
