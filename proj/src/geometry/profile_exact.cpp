#include <algorithm>
#include <cmath>

#include "rfk/geometry.hpp"
#include "rfk/numerics.hpp"

namespace rfk::geometry {

namespace {

// Guard applied to the clamped arccos argument near tangency.
constexpr double kTangencyGuard = 1e-12;

double clamped_acos(double a) {
    if (a >= 1.0 - kTangencyGuard) return a >= 1.0 ? 0.0 : std::acos(a);
    if (a <= -1.0 + kTangencyGuard) return a <= -1.0 ? std::numbers::pi : std::acos(a);
    return std::acos(a);
}

} // namespace

double spherical_cap_measure(const ProblemParams& params, double rho, double theta) {
    const int n = params.dim();
    if (n < 2) throw InvalidInput("cap measure needs N >= 2");
    if (theta <= 0.0 || rho <= 0.0) return 0.0;
    theta = std::min(theta, std::numbers::pi);
    if (n == 2) return 2.0 * rho * theta;
    if (n == 3) return 2.0 * std::numbers::pi * rho * rho * (1.0 - std::cos(theta));
    const ProblemParams lower(n - 1, 2.0);
    const double sphere_lower = (n - 1) * lower.unit_ball_volume();
    // I_m = -sin^{m-1} cos / m + (m-1)/m I_{m-2}, I_m = int_0^theta sin^m.
    const double sn = std::sin(theta);
    const double cs = std::cos(theta);
    const int m = n - 2;
    double integral = m % 2 == 0 ? theta : 1.0 - cs;
    for (int k = m % 2 == 0 ? 2 : 3; k <= m; k += 2)
        integral = -std::pow(sn, k - 1) * cs / k + (k - 1.0) / k * integral;
    return sphere_lower * std::pow(rho, n - 1) * integral;
}

double spherical_exhaustion_depth(const SphericalShape& shape, Side side) {
    if (side == Side::FromOuter) return shape.e >= shape.R0 ? shape.R1 : shape.R1 - (shape.R0 - shape.e);
    if (shape.R0 <= 0.0) throw InvalidInput("inner parallels need a hole");
    return shape.R1 + shape.e - shape.R0;
}

double spherical_parallel_measure(const SphericalShape& shape, Side side, const ProblemParams& params,
                                  double delta) {
    const double R0 = shape.R0;
    const double R1 = shape.R1;
    const double e = shape.e;
    if (side == Side::FromOuter) {
        const double rho = R1 - delta;
        if (rho <= 0.0) return 0.0;
        const double full = params.sphere_measure(rho);
        if (R0 <= 0.0) return full;
        if (e == 0.0) return rho >= R0 ? full : 0.0;
        if (rho >= e + R0 || rho <= e - R0) return full;
        if (rho <= R0 - e) return 0.0;
        const double a = (rho * rho + e * e - R0 * R0) / (2.0 * rho * e);
        return std::max(full - spherical_cap_measure(params, rho, clamped_acos(a)), 0.0);
    }
    if (R0 <= 0.0) throw InvalidInput("inner parallels need a hole");
    const double rho = R0 + delta;
    const double full = params.sphere_measure(rho);
    if (e == 0.0) return rho <= R1 ? full : 0.0;
    if (rho <= R1 - e) return full;
    if (rho >= R1 + e) return 0.0;
    const double a = (R1 * R1 - rho * rho - e * e) / (2.0 * rho * e);
    return std::max(full - spherical_cap_measure(params, rho, clamped_acos(a)), 0.0);
}

ParallelProfile parallel_profile_exact(const DomainSpec& domain, Side side, const ProblemParams& params,
                                       std::size_t grid_size) {
    if (grid_size < 16) throw InvalidInput("profile grid_size must be >= 16");
    if (domain.is_polygon()) throw InvalidInput("exact profiles need a spherical domain; use the MC or polygon path");
    if (params.dim() != domain.dim()) throw InvalidInput("params dimension differs from the domain dimension");
    const SphericalShape shape = domain.spherical();
    if (side == Side::FromInner && shape.R0 <= 0.0) throw InvalidInput("inner parallels need a hole");

    const Measures m = measures(domain);
    ParallelProfile prof;
    prof.side = side;
    prof.dim = params.dim();
    prof.method = "exact";
    prof.domain_volume = m.volume;
    prof.boundary_measure = side == Side::FromOuter ? m.outer_measure : m.designated_hole_measure;
    prof.reference_radius = side == Side::FromOuter ? shape.R1 : shape.R0;
    prof.delta_omega = spherical_exhaustion_depth(shape, side);
    prof.relative_tolerance = 1e-9;

    std::vector<double> rho_kinks;
    if (shape.e > 0.0) {
        if (side == Side::FromOuter)
            rho_kinks = {std::abs(shape.R0 - shape.e), shape.e + shape.R0};
        else
            rho_kinks = {shape.R1 - shape.e, shape.R1 + shape.e};
    }
    for (double rk : rho_kinks) {
        const double d = side == Side::FromOuter ? shape.R1 - rk : rk - shape.R0;
        if (d > 0.0 && d < prof.delta_omega) prof.kinks.push_back(d);
    }
    std::sort(prof.kinks.begin(), prof.kinks.end());

    prof.exact_s = [shape, side, params](double d) { return spherical_parallel_measure(shape, side, params, d); };

    prof.delta = numerics::linspace(0.0, prof.delta_omega, grid_size);
    const std::size_t n = grid_size;
    prof.s.resize(n);
    prof.v.resize(n);
    prof.S.resize(n);
    prof.V.resize(n);
    // s at the last node is the one-sided limit from below.
    for (std::size_t i = 0; i < n; ++i) {
        const double d = prof.delta[i];
        if (i + 1 == n) {
            const double below = std::nextafter(d, 0.0);
            prof.s[i] = shape.e == 0.0 ? spherical_parallel_measure(shape, side, params, below)
                                       : spherical_parallel_measure(shape, side, params, d);
        } else {
            prof.s[i] = spherical_parallel_measure(shape, side, params, d);
        }
        prof.S[i] = reference_measure(side, params, prof.reference_radius, d);
        prof.V[i] = reference_volume(side, params, prof.reference_radius, d);
    }
    prof.v[0] = 0.0;
    double err = 0.0;
    const double s_scale = *std::max_element(prof.S.begin(), prof.S.end());
    for (std::size_t i = 1; i < n; ++i) {
        const double a = prof.delta[i - 1];
        const double b = prof.delta[i];
        const double tol = 1e-14 * s_scale * (b - a);
        prof.v[i] = prof.v[i - 1] + numerics::integrate_gauss_split(prof.exact_s, a, b, prof.kinks, tol);
        err += tol;
    }
    prof.quadrature_error = err + 1e-15 * m.volume * static_cast<double>(n);
    return prof;
}

} // namespace rfk::geometry
