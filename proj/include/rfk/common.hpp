#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rfk {

/// Raised for inputs that violate a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot deliver a result
/// (bracketing failure, step underflow, stagnation, infeasible geometry).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spatial dimension and p-Laplacian exponent together with the derived
/// constants used throughout the isoperimetric and transplantation code.
class ProblemParams {
public:
    ProblemParams(int dim, double p) : dim_(dim), p_(p) {
        if (dim < 1) throw InvalidInput("dimension must be >= 1");
        if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("p must lie in (1, inf)");
        p_conj_ = p / (p - 1.0);
        omega_ = std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
        if (dim >= 2) {
            dim_conj_ = static_cast<double>(dim) / (dim - 1.0);
            iso_constant_ = std::pow(static_cast<double>(dim), dim_conj_) * std::pow(omega_, dim_conj_ - 1.0);
        }
    }

    int dim() const { return dim_; }
    double p() const { return p_; }
    /// Hoelder conjugate p' = p/(p-1).
    double p_conj() const { return p_conj_; }
    /// N' = N/(N-1); undefined (NaN) for N = 1.
    double dim_conj() const { return dim_conj_; }
    /// Lebesgue measure of the unit ball in R^N.
    double unit_ball_volume() const { return omega_; }
    /// C(N) = N^{N'} omega_N^{N'-1}; equals 4 pi for N = 2.
    double iso_constant() const { return iso_constant_; }

    /// (N-1)-measure of a sphere of radius R.
    double sphere_measure(double radius) const {
        if (dim_ == 1) return 2.0;
        return dim_ * omega_ * std::pow(radius, dim_ - 1);
    }
    double ball_volume(double radius) const { return omega_ * std::pow(radius, dim_); }
    /// Inverse of sphere_measure.
    double radius_for_measure(double measure) const {
        return std::pow(measure / (dim_ * omega_), 1.0 / (dim_ - 1.0));
    }

    /// r^{N-1}, exact for integer powers (avoids pow(0, 0) issues for N = 1).
    double radial_weight(double r) const {
        double w = 1.0;
        for (int i = 1; i < dim_; ++i) w *= r;
        return w;
    }

private:
    int dim_;
    double p_;
    double p_conj_ = 0.0;
    double dim_conj_ = std::nan("");
    double omega_ = 0.0;
    double iso_constant_ = std::nan("");
};

} // namespace rfk
