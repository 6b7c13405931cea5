#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rfk/io.hpp"
#include "rfk/numerics.hpp"
#include "rfk/transplant.hpp"

namespace rfk::transplant {

namespace {

constexpr double kClipRatio = 1e-10;

double max_of(const std::vector<double>& x) { return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end()); }

double sphere_const(const ParamMaps& m) {
    const ProblemParams pp(m.dim, m.p);
    return m.dim * pp.unit_ball_volume();
}

// Closed-form H(alpha) = (|G0|^{N'} - C alpha)^{1/N'}, zero past |Omega^#|.
double H_of(const ProblemParams& pp, double gamma0, double a) {
    const double nc = pp.dim_conj();
    const double x = std::pow(gamma0, nc) - pp.iso_constant() * a;
    if (pp.dim() == 2) return std::sqrt(std::max(gamma0 * gamma0 - pp.iso_constant() * a, 0.0));
    return x > 0.0 ? std::pow(x, 1.0 / nc) : 0.0;
}

double r_of(const ProblemParams& pp, double gamma0, double a) {
    const double x = std::pow(gamma0, pp.dim_conj()) - pp.iso_constant() * a;
    const double c = pp.iso_constant() * pp.unit_ball_volume();
    return x > 0.0 ? std::pow(x / c, 1.0 / pp.dim()) : 0.0;
}

} // namespace

double ParamMaps::T_of(double d) const {
    const double a = std::pow(sphere_const(*this), 1.0 - p / (p - 1.0));
    const double k1 = (p - dim) / (p - 1.0);
    if (std::abs(k1) < 1e-12) return a * std::log((R0 + d) / R0);
    return a * (std::pow(R0 + d, k1) - std::pow(R0, k1)) / k1;
}

double ParamMaps::T_inverse(double x) const {
    const double a = std::pow(sphere_const(*this), 1.0 - p / (p - 1.0));
    const double k1 = (p - dim) / (p - 1.0);
    if (std::abs(k1) < 1e-12) return R0 * std::exp(x / a) - R0;
    const double base = std::pow(R0, k1) + k1 * x / a;
    if (!(base > 0.0)) return std::numeric_limits<double>::infinity();
    return std::pow(base, 1.0 / k1) - R0;
}

double ParamMaps::s_at(double d) const { return numerics::PiecewiseLinear(delta, s)(d); }
double ParamMaps::v_at(double d) const { return numerics::PiecewiseLinear(delta, v)(d); }

ParamMaps build_maps(const geometry::ParallelProfile& profile, const ProblemParams& params) {
    const std::size_t n = profile.size();
    if (n < 3 || profile.s.size() != n || profile.v.size() != n) throw InvalidInput("profile needs at least 3 knots");
    if (params.dim() < 2) throw InvalidInput("transplantation maps need N >= 2");
    if (profile.dim != params.dim()) throw InvalidInput("profile dimension does not match the problem");
    for (std::size_t i = 1; i < n; ++i)
        if (!(profile.delta[i] > profile.delta[i - 1])) throw InvalidInput("profile delta grid not increasing");

    ParamMaps m;
    m.side = profile.side;
    m.dim = params.dim();
    m.p = params.p();
    m.volume = profile.domain_volume;
    m.boundary_measure = profile.boundary_measure;
    m.delta_omega = profile.delta_omega;
    m.delta = profile.delta;
    m.s = profile.s;
    m.v = profile.v;
    m.exact_profile = static_cast<bool>(profile.exact_s);
    m.rectified = profile.rectified;
    for (auto& x : m.s) x = std::max(x, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        if (m.v[i] < m.v[i - 1]) {
            m.v[i] = m.v[i - 1];
            m.rectified = true;
        }
    const double vol = m.volume;
    if (profile.stochastic()) {
        m.s_tolerance = 3.0 * max_of(profile.s_stderr);
        m.v_tolerance = 3.0 * max_of(profile.v_stderr) + profile.quadrature_error;
    } else {
        m.s_tolerance = profile.relative_tolerance * profile.boundary_measure;
        m.v_tolerance = profile.quadrature_error + 1e-14 * vol * static_cast<double>(n);
    }

    const double omega = params.unit_ball_volume();
    const int N = params.dim();
    if (m.side == Side::FromOuter) {
        const double g0 = profile.boundary_measure;
        m.R1 = params.radius_for_measure(g0);
        const double inner_pow = std::pow(m.R1, N) - vol / omega;
        if (inner_pow < -1e-9 * std::pow(m.R1, N))
            throw NumericalFailure("isoperimetric violation: |Omega| exceeds the ball bounded by Gamma_0");
        // Same ball threshold as geometry::reference_annulus.
        m.R0 = inner_pow > 1e-12 * std::pow(m.R1, N) ? std::pow(inner_pow, 1.0 / N) : 0.0;
        const double top = std::pow(g0, params.dim_conj());
        const double C = params.iso_constant();
        m.r.resize(n);
        m.alpha = m.v;
        m.h = m.s;
        m.H.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double radicand = top - C * m.v[i];
            if (radicand < -(C * m.v_tolerance + 1e-12 * top)) {
                std::ostringstream msg;
                msg << "isoperimetric violation: negative radicand " << io::fmt(radicand) << " at delta = "
                    << io::fmt(m.delta[i]);
                throw NumericalFailure(msg.str());
            }
            m.r[i] = r_of(params, g0, m.v[i]);
            m.H[i] = H_of(params, g0, m.alpha[i]);
        }
        return m;
    }

    // FromInner
    if (!(profile.reference_radius > 0.0)) throw InvalidInput("inner maps need a hole of positive measure");
    m.R0 = params.radius_for_measure(profile.boundary_measure);
    m.R1 = std::pow(std::pow(m.R0, N) + vol / omega, 1.0 / N);
    const double q = 1.0 - params.p_conj();
    const double s_max = max_of(m.s);
    m.clip_floor = kClipRatio * s_max;
    const double floor = m.clip_floor;
    auto integrand = [&](double sv) { return std::pow(std::max(sv, floor), q); };
    m.t.assign(n, 0.0);
    if (m.exact_profile) {
        const auto f = [&](double d) { return integrand(profile.exact_s(d)); };
        const double scale = std::pow(s_max, q);
        for (std::size_t i = 1; i < n; ++i) {
            const double a = m.delta[i - 1];
            const double b = m.delta[i];
            // Relative target: near an exhaustion point s^{1-p'} is unbounded.
            const double coarse = std::abs(numerics::integrate_gauss(f, a, b, 0.0, 0));
            const double tol = 1e-12 * coarse + 1e-13 * scale * (b - a);
            m.t[i] = m.t[i - 1] + numerics::integrate_gauss_split(f, a, b, profile.kinks, tol);
        }
    } else {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = integrand(m.s[i]);
        m.t = numerics::cumulative_trapezoid(m.delta, y);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (m.s[i] < floor) {
            m.clipped = true;
            const double lo = i > 0 ? m.delta[i - 1] : m.delta[i];
            const double hi = i + 1 < n ? m.delta[i + 1] : m.delta[i];
            m.clipped_length += 0.5 * (hi - lo);
        }
    m.T_hash = m.T_of(m.R1 - m.R0);
    m.t_omega = m.t.back();
    m.alpha = m.t;
    m.g = m.s;
    m.T.resize(n);
    m.G.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.T[i] = m.T_of(m.delta[i]);
        const double rho = m.R0 + m.T_inverse(m.t[i]);
        m.G[i] = std::isfinite(rho) ? params.sphere_measure(rho) : std::numeric_limits<double>::infinity();
    }
    return m;
}

VerificationReport check_map_lemmas(const ParamMaps& m) {
    const ProblemParams pp(m.dim, m.p);
    const std::size_t n = m.delta.size();
    VerificationReport rep;
    rep.meta["side"] = geometry::to_string(m.side);
    rep.meta["margin_units"] = "tolerance_multiples";
    rep.tolerance = 1.0;
    const double ulp = 4.0 * std::numeric_limits<double>::epsilon();

    if (m.side == Side::FromOuter) {
        rep.check = "lemmas_outer";
        const double g0 = m.boundary_measure;
        // r(delta) and H(alpha) errors induced by the v tolerance.
        const double ev = m.v_tolerance + ulp * m.volume;
        std::vector<double> r_err(n);
        for (std::size_t i = 0; i < n; ++i)
            r_err[i] = r_of(pp, g0, std::max(m.v[i] - ev, 0.0)) - r_of(pp, g0, m.v[i] + ev) + ulp * m.R1;
        double worst_slope = std::numeric_limits<double>::infinity();
        double max_slope = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dd = m.delta[i + 1] - m.delta[i];
            const double slope = std::abs(m.r[i + 1] - m.r[i]) / dd;
            const double allow = std::max((r_err[i] + r_err[i + 1]) / dd, 1e-9);
            max_slope = std::max(max_slope, slope);
            worst_slope = std::min(worst_slope, (1.0 - slope) / allow);
        }
        rep.meta["max_abs_slope"] = max_slope;
        rep.meta["slope_worst_margin"] = worst_slope;
        rep.meta["slope_holds"] = worst_slope >= -1.0;
        rep.grid = m.alpha;
        rep.margins.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double dH = H_of(pp, g0, std::max(m.alpha[i] - ev, 0.0)) - H_of(pp, g0, m.alpha[i] + ev);
            const double tol = m.s_tolerance + dH + ulp * g0;
            rep.margins[i] = (m.H[i] - m.h[i]) / tol;
        }
        finalize(rep);
        if (worst_slope < -1.0) rep.verdict = Verdict::Violated;
    } else {
        rep.check = "lemmas_inner";
        // Knots with alpha <= T_hash.
        std::size_t cnt = 0;
        while (cnt < n && m.alpha[cnt] <= m.T_hash) ++cnt;
        if (cnt < 2) throw NumericalFailure("fewer than two knots below T_hash");
        rep.grid.assign(m.alpha.begin(), m.alpha.begin() + static_cast<std::ptrdiff_t>(cnt));
        rep.margins.resize(cnt);
        // Propagated error of t: quadrature plus the s tolerance through
        // d(s^{1-p'}) = (p'-1) s^{-p'} ds.
        const double pc = pp.p_conj();
        double et = 0.0;
        for (std::size_t i = 0; i < cnt; ++i) {
            if (i > 0) {
                const double dd = m.delta[i] - m.delta[i - 1];
                const double sm = std::max(0.5 * (m.s[i] + m.s[i - 1]), m.clip_floor);
                et += dd * (pc - 1.0) * std::pow(sm, -pc) * m.s_tolerance + 1e-13 * m.alpha[i];
            }
            const auto G_at = [&](double a) { return pp.sphere_measure(m.R0 + m.T_inverse(std::max(a, 0.0))); };
            const double dG = G_at(m.alpha[i] + et) - G_at(m.alpha[i] - et);
            const double tol = m.s_tolerance + dG + ulp * m.G[i];
            rep.margins[i] = (m.G[i] - m.g[i]) / tol;
        }
        finalize(rep);
        rep.meta["T_hash"] = m.T_hash;
        rep.meta["t_omega"] = m.t_omega;
        rep.meta["T_hash_le_t_omega"] = m.T_hash <= m.t_omega * (1.0 + 1e-9);
        if (!(m.T_hash <= m.t_omega * (1.0 + 1e-9))) rep.verdict = Verdict::Violated;
        // Change of variables: int_0^{t_omega} g^{p'} d alpha = |Omega|.
        double mass = 0.0;
        for (std::size_t i = 1; i < n; ++i)
            mass += 0.5 * (m.alpha[i] - m.alpha[i - 1]) * (std::pow(m.g[i], pc) + std::pow(m.g[i - 1], pc));
        rep.meta["g_mass"] = mass;
        rep.meta["g_mass_relative_error"] = std::abs(mass - m.volume) / m.volume;
        rep.meta["clipped"] = m.clipped;
    }
    // alpha0: start of the terminal run of strictly positive margins.
    std::size_t first = rep.margins.size();
    while (first > 0 && rep.margins[first - 1] > rep.tolerance) --first;
    const bool strict = first < rep.margins.size();
    rep.meta["alpha0"] = strict ? rep.grid[first] : rep.grid.back();
    rep.meta["alpha0_index"] = first;
    rep.meta["strict_terminal_interval"] = strict;
    return rep;
}

nlohmann::json maps_metadata(const ParamMaps& m) {
    nlohmann::json j;
    j["schema"] = 1;
    j["side"] = geometry::to_string(m.side);
    j["dim"] = m.dim;
    j["p"] = m.p;
    j["R0"] = m.R0;
    j["R1"] = m.R1;
    j["volume"] = m.volume;
    j["boundary_measure"] = m.boundary_measure;
    j["delta_omega"] = m.delta_omega;
    j["knots"] = m.delta.size();
    j["rectified"] = m.rectified;
    if (m.side == Side::FromInner) {
        j["T_hash"] = m.T_hash;
        j["t_omega"] = m.t_omega;
        j["clipped"] = m.clipped;
        j["clip_floor"] = m.clip_floor;
        j["clipped_length"] = m.clipped_length;
    }
    return j;
}

std::string maps_csv(const ParamMaps& m) {
    std::ostringstream out;
    const bool outer = m.side == Side::FromOuter;
    out << (outer ? "delta,r,alpha,h,H\n" : "delta,t,T,g,G\n");
    for (std::size_t i = 0; i < m.delta.size(); ++i) {
        out << io::fmt(m.delta[i]) << ',';
        if (outer)
            out << io::fmt(m.r[i]) << ',' << io::fmt(m.alpha[i]) << ',' << io::fmt(m.h[i]) << ',' << io::fmt(m.H[i]);
        else
            out << io::fmt(m.t[i]) << ',' << io::fmt(m.T[i]) << ',' << io::fmt(m.g[i]) << ',' << io::fmt(m.G[i]);
        out << '\n';
    }
    return out.str();
}

} // namespace rfk::transplant
