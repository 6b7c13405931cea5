#include <algorithm>
#include <cmath>
#include <sstream>

#include "rfk/numerics.hpp"
#include "rfk/radial.hpp"

namespace rfk::radial {

namespace {

using numerics::signed_pow;

constexpr double kLocalTol = 1e-12;
constexpr double kMinStepRatio = 1e-12;
constexpr double kBallStart = 1e-8;
constexpr double kEndZeroGuard = 1e-6;
constexpr double kRoundoff = 1e-15;

struct State {
    double phi;
    double w;
};

struct System {
    double lambda;
    int dim;
    double p;
    double p_conj;

    double weight(double r) const {
        double x = 1.0;
        for (int i = 1; i < dim; ++i) x *= r;
        return x;
    }
    double dphi(double r, double w) const {
        if (w == 0.0) return 0.0;
        const double wr = weight(r);
        return signed_pow(w / wr, p_conj - 1.0);
    }
    double dw(double r, double phi) const { return -lambda * weight(r) * signed_pow(phi, p - 1.0); }
    State rhs(double r, const State& y) const { return {dphi(r, y.w), dw(r, y.phi)}; }
};

State rk4(const System& sys, double r, const State& y, double h, const State& k1) {
    const State k2 = sys.rhs(r + 0.5 * h, {y.phi + 0.5 * h * k1.phi, y.w + 0.5 * h * k1.w});
    const State k3 = sys.rhs(r + 0.5 * h, {y.phi + 0.5 * h * k2.phi, y.w + 0.5 * h * k2.w});
    const State k4 = sys.rhs(r + h, {y.phi + h * k3.phi, y.w + h * k3.w});
    return {y.phi + h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
            y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double outer_residual(const RadialProblem& pr, const State& y) {
    switch (pr.outer.kind) {
    case BcKind::Dirichlet: return y.phi;
    case BcKind::Neumann: return y.w;
    case BcKind::Robin: {
        double wr = 1.0;
        for (int i = 1; i < pr.params.dim(); ++i) wr *= pr.R1;
        return y.w + pr.outer.k * wr * signed_pow(y.phi, pr.params.p() - 1.0);
    }
    }
    return y.phi;
}

} // namespace

std::string to_string(const BoundaryCondition& bc) {
    switch (bc.kind) {
    case BcKind::Dirichlet: return "dirichlet";
    case BcKind::Neumann: return "neumann";
    case BcKind::Robin: return "robin";
    }
    return "neumann";
}

BoundaryCondition bc_from_string(const std::string& name, double k) {
    if (name == "dirichlet" || name == "D") return BoundaryCondition::dirichlet();
    if (name == "neumann" || name == "N") return BoundaryCondition::neumann();
    if (name == "robin" || name == "R") return BoundaryCondition::robin(k);
    throw InvalidInput("unknown boundary condition '" + name + "'");
}

void RadialProblem::validate() const {
    if (!(R0 >= 0.0) || !std::isfinite(R0)) throw InvalidInput("R0 must be >= 0");
    if (!(R1 > R0) || !std::isfinite(R1)) throw InvalidInput("R1 must exceed R0");
    for (const auto* bc : {&inner, &outer})
        if (bc->kind == BcKind::Robin && !(bc->k > 0.0)) throw InvalidInput("Robin condition needs k > 0");
    if (R0 == 0.0 && params.dim() >= 2 && inner.kind != BcKind::Neumann)
        throw InvalidInput("a ball (R0 = 0) needs the regularity (Neumann) condition at the centre");
}

ShootResult shoot(const RadialProblem& pr, double lambda, bool keep_trajectory) {
    pr.validate();
    if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
    const int n = pr.params.dim();
    const double p = pr.params.p();
    const System sys{lambda, n, p, pr.params.p_conj()};
    const double L = pr.length();
    const double start = pr.is_ball() ? kBallStart * pr.R1 : pr.R0;

    State y{};
    switch (pr.inner.kind) {
    case BcKind::Neumann: y = {1.0, 0.0}; break;
    case BcKind::Robin: y = {1.0, pr.inner.k * sys.weight(pr.R0)}; break;
    case BcKind::Dirichlet: y = {0.0, 1.0}; break;
    }
    // Natural magnitudes of phi and w over the interval.
    double phi_scale = std::max(std::abs(y.phi), 1e-300);
    if (y.phi == 0.0) phi_scale = std::max(std::abs(sys.dphi(std::max(start, 1e-300), y.w)) * L, 1e-300);
    const double vol = n == 1 ? L : (std::pow(pr.R1, n) - std::pow(start, n)) / n;
    double w_scale = std::max({std::abs(y.w), lambda * vol * std::pow(phi_scale, p - 1.0), 1e-300});

    ShootResult res;
    double r = start;
    if (keep_trajectory) {
        res.r.push_back(r);
        res.phi.push_back(y.phi);
        res.w.push_back(y.w);
    }
    int last_sign = y.phi != 0.0 ? sign_of(y.phi) : sign_of(y.w);
    const double h_min = kMinStepRatio * L;
    const double h_max = L / 64.0;
    double h = L * 1e-4;
    const double end_guard = pr.outer.kind == BcKind::Dirichlet ? kEndZeroGuard * L : 0.0;
    while (r < pr.R1) {
        h = std::min({h, h_max, pr.R1 - r});
        const State k1 = sys.rhs(r, y);
        const State full = rk4(sys, r, y, h, k1);
        const State half = rk4(sys, r, y, 0.5 * h, k1);
        const State two = rk4(sys, r + 0.5 * h, half, 0.5 * h, sys.rhs(r + 0.5 * h, half));
        const double e_phi = std::abs(two.phi - full.phi) / 15.0;
        const double e_w = std::abs(two.w - full.w) / 15.0;
        const double err = std::max(e_phi / std::max(phi_scale, std::abs(two.phi)), e_w / std::max(w_scale, std::abs(two.w)));
        // Per-unit-length target, floored at a few ulps of the state.
        const double target = std::max(kLocalTol * h / L, kRoundoff);
        // Near the non-Lipschitz points of phi' (w = 0, p > 2) accept an
        // absolute local error once the step is already tiny.
        const bool accept = err <= target || (h <= 64.0 * h_min && err <= kLocalTol);
        if (!accept) {
            if (h <= h_min) {
                std::ostringstream msg;
                msg << "radial integration step underflow at r = " << r << " (lambda = " << lambda << ")";
                throw NumericalFailure(msg.str());
            }
            const double factor = err > 0.0 && std::isfinite(err) ? std::clamp(0.9 * std::pow(target / err, 0.2), 0.1, 0.5) : 0.1;
            h = std::max(h * factor, h_min);
            continue;
        }
        const State next{two.phi + (two.phi - full.phi) / 15.0, two.w + (two.w - full.w) / 15.0};
        const double r_next = (pr.R1 - r) <= h ? pr.R1 : r + h;
        const int s = sign_of(next.phi);
        if (s != 0 && last_sign != 0 && s != last_sign) {
            const double t = y.phi / (y.phi - next.phi);
            const double rz = r + t * (r_next - r);
            res.zeros.push_back(rz);
            if (rz < pr.R1 - end_guard) ++res.zero_count;
        }
        if (s != 0) last_sign = s;
        r = r_next;
        y = next;
        phi_scale = std::max(phi_scale, std::abs(y.phi));
        w_scale = std::max(w_scale, std::abs(y.w));
        ++res.steps;
        if (keep_trajectory) {
            res.r.push_back(r);
            res.phi.push_back(y.phi);
            res.w.push_back(y.w);
        }
        const double grow = err > 0.0 ? std::clamp(0.9 * std::pow(target / err, 0.2), 1.0, 2.0) : 2.0;
        h *= grow;
    }
    res.end_residual = outer_residual(pr, y);
    return res;
}

} // namespace rfk::radial
