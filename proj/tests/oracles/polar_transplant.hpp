#pragma once

// Rayleigh quotient of u = phi(r(delta(x))) on the planar eccentric annulus
// (hole of radius R0 centred at (e, 0) inside the disk of radius R1), built
// from scratch: arc fractions by counting angles, v by the midpoint rule and
// r from |Gamma_0|^2 - 4 pi v = (2 pi r)^2.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

struct PolarQuotient {
    double quotient;
    double volume;
};

inline PolarQuotient polar_transplant_quotient(double R0, double R1, double e, double p,
                                               const std::function<double(double)>& phi,
                                               const std::function<double(double)>& dphi, int n_rho = 4000,
                                               int n_theta = 20000) {
    const double pi = std::numbers::pi;
    const double h = R1 / n_rho;
    const double gamma0 = 2.0 * pi * R1;
    double v = 0.0;
    double num = 0.0;
    double den = 0.0;
    // Walk inward from the outer circle: delta = R1 - rho.
    for (int i = 0; i < n_rho; ++i) {
        const double rho = R1 - (i + 0.5) * h;
        int hits = 0;
        for (int k = 0; k < n_theta; ++k) {
            const double t = (k + 0.5) * 2.0 * pi / n_theta;
            const double x = rho * std::cos(t) - e;
            const double y = rho * std::sin(t);
            if (x * x + y * y > R0 * R0) ++hits;
        }
        const double s = 2.0 * pi * rho * hits / n_theta;
        const double v_mid = v + 0.5 * h * s;
        v += h * s;
        const double r = std::sqrt(std::max(gamma0 * gamma0 - 4.0 * pi * v_mid, 0.0)) / (2.0 * pi);
        if (s == 0.0) continue;
        const double slope = s / (2.0 * pi * r);
        num += std::pow(std::abs(dphi(r)) * slope, p) * s * h;
        den += std::pow(std::abs(phi(r)), p) * s * h;
    }
    return {num / den, v};
}

} // namespace oracle
