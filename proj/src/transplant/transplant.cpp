#include <algorithm>
#include <cmath>

#include "rfk/numerics.hpp"
#include "rfk/transplant.hpp"

namespace rfk::transplant {

namespace {

using numerics::abs_pow;

constexpr double kExactTolerance = 1e-8;

void require_radii(const radial::RadialProblem& pr, const ParamMaps& m) {
    const double tol = 1e-9 * m.R1;
    if (std::abs(pr.R0 - m.R0) > tol || std::abs(pr.R1 - m.R1) > tol)
        throw InvalidInput("radial problem is not posed on the reference annulus of the maps");
    if (pr.params.dim() != m.dim || pr.params.p() != m.p) throw InvalidInput("radial problem has different N or p");
}

void require_volume(const ParamMaps& m) {
    const double rel = m.boundary_measure > 0.0 ? m.s_tolerance / m.boundary_measure : 0.0;
    const double tol = std::max({10.0 * m.v_tolerance, rel * m.volume, 1e-12 * m.volume});
    if (std::abs(m.v.back() - m.volume) > tol)
        throw InvalidInput("domain/profile mismatch: v(delta_Omega) differs from |Omega|");
}

double relative_tolerance(const ParamMaps& m) {
    if (m.exact_profile) return kExactTolerance;
    return std::max(kExactTolerance, m.s_tolerance / m.boundary_measure);
}

} // namespace

void classify(TransplantReport& rep) {
    rep.margin = rep.reference_quadrature - rep.quotient;
    if (rep.margin < -rep.tolerance)
        rep.verdict = Verdict::Violated;
    else if (std::abs(rep.margin) <= rep.tolerance)
        rep.verdict = Verdict::HoldsWithEquality;
    else
        rep.verdict = Verdict::Holds;
}

TransplantReport transplant_outer(const radial::RadialEigenpair& pair, const radial::RadialProblem& pr,
                                  const ParamMaps& m) {
    if (m.side != Side::FromOuter) throw InvalidInput("transplant_outer needs FromOuter maps");
    require_radii(pr, m);
    if (pr.inner.kind != radial::BcKind::Neumann) throw InvalidInput("Omega^# carries a Neumann inner condition");
    if (pr.outer.kind == radial::BcKind::Neumann) throw InvalidInput("Omega^# needs a Dirichlet or Robin outer condition");
    require_volume(m);
    const ProblemParams pp(m.dim, m.p);
    const int N = m.dim;
    const double p = m.p;
    const double area = N * pp.unit_ball_volume();
    const std::size_t n = m.delta.size();

    // |r'| at the knots, interpolated in r.
    std::vector<double> kr(n), kw(n);
    double last = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        kr[i] = m.r[j];
        if (m.r[j] > 1e-12 * m.R1) last = m.s[j] / (area * pp.radial_weight(m.r[j]));
        kw[i] = last;
    }
    // The ball end of a degenerate reference repeats the next weight.
    if (kr[0] <= 1e-12 * m.R1 && n > 1) kw[0] = kw[1];
    const numerics::PiecewiseLinear weight(kr, kw);

    const std::size_t M = pair.r.size();
    std::vector<double> num(M), ref(M), den(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double r = pair.r[i];
        const double wr = pp.radial_weight(r);
        const double grad = abs_pow(pair.dphi[i], p) * wr;
        ref[i] = grad;
        num[i] = grad * std::pow(weight(r), p);
        den[i] = abs_pow(pair.phi[i], p) * wr;
    }
    const double step = pair.r[1] - pair.r[0];
    double robin = 0.0;
    if (pr.outer.kind == radial::BcKind::Robin) robin = pr.outer.k * pp.radial_weight(m.R1) * abs_pow(pair.phi.back(), p);
    const double bottom = numerics::simpson_uniform(den, step);
    TransplantReport rep;
    rep.side = Side::FromOuter;
    rep.quotient = (numerics::simpson_uniform(num, step) + robin) / bottom;
    rep.reference_quadrature = (numerics::simpson_uniform(ref, step) + robin) / bottom;
    rep.reference = pair.eigenvalue;
    rep.radial_nodes = M;
    rep.profile_nodes = n;
    rep.tolerance = relative_tolerance(m) * rep.reference;
    classify(rep);

    // Same test function in the area parameter alpha = v(delta).
    const numerics::PiecewiseLinear h_of(m.alpha, m.h);
    const double g0 = m.boundary_measure;
    const double C = pp.iso_constant();
    const double top = std::pow(g0, pp.dim_conj());
    const std::vector<double> alpha = numerics::linspace(0.0, m.volume, M);
    std::vector<double> anum(M), aden(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double x = top - C * alpha[i];
        const double r = x > 0.0 ? std::pow(x / (C * pp.unit_ball_volume()), 1.0 / N) : 0.0;
        const double phi = pair.phi_at(r);
        aden[i] = abs_pow(phi, p);
        anum[i] = r > 1e-12 * m.R1 ? abs_pow(pair.dphi_at(r) * h_of(alpha[i]) / (area * pp.radial_weight(r)), p) : 0.0;
    }
    const double astep = alpha[1] - alpha[0];
    const double arobin = robin * area;
    rep.area_quotient = (numerics::simpson_uniform(anum, astep) + arobin) / numerics::simpson_uniform(aden, astep);
    rep.meta["area_relative_difference"] = std::abs(*rep.area_quotient - rep.quotient) / rep.quotient;
    rep.meta["reference_quadrature_gap"] = std::abs(rep.reference_quadrature - rep.reference) / rep.reference;
    rep.meta["outer_condition"] = radial::to_string(pr.outer);
    if (pr.outer.kind == radial::BcKind::Robin) rep.meta["k"] = pr.outer.k;
    return rep;
}

TransplantReport transplant_inner(const radial::RadialEigenpair& pair, const radial::RadialProblem& pr,
                                  const ParamMaps& m) {
    if (m.side != Side::FromInner) throw InvalidInput("transplant_inner needs FromInner maps");
    require_radii(pr, m);
    if (pr.inner.kind != radial::BcKind::Dirichlet || pr.outer.kind != radial::BcKind::Neumann)
        throw InvalidInput("Omega_# carries Dirichlet inner and Neumann outer conditions");
    require_volume(m);
    const ProblemParams pp(m.dim, m.p);
    const double p = m.p;
    const double pc = pp.p_conj();
    const double area = m.dim * pp.unit_ball_volume();
    const std::size_t n = m.delta.size();

    // kappa = (g/G)^{p'} as a function of rho = R0 + T^{-1}(alpha), alpha <= T_hash.
    std::vector<double> kr, kk;
    for (std::size_t i = 0; i < n && m.alpha[i] <= m.T_hash; ++i) {
        const double rho = std::min(m.R0 + m.T_inverse(m.alpha[i]), m.R1);
        kr.push_back(rho);
        kk.push_back(std::pow(m.s[i] / pp.sphere_measure(rho), pc));
    }
    if (kr.empty()) throw NumericalFailure("no transplant knots below T_hash");
    const numerics::PiecewiseLinear t_of(m.delta, m.t);
    const double d_star = m.t_omega > m.T_hash ? t_of.inverse(m.T_hash) : m.delta_omega;
    const double v_star = m.v_at(d_star);
    if (kr.back() < m.R1) {
        kr.push_back(m.R1);
        kk.push_back(std::pow(m.s_at(d_star) / pp.sphere_measure(m.R1), pc));
    }
    const numerics::PiecewiseLinear kappa(kr, kk);

    const std::size_t M = pair.r.size();
    std::vector<double> num(M), den(M), ref(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double r = pair.r[i];
        const double wr = pp.radial_weight(r);
        num[i] = abs_pow(pair.dphi[i], p) * wr;
        ref[i] = abs_pow(pair.phi[i], p) * wr;
        den[i] = ref[i] * kappa(r);
    }
    const double step = pair.r[1] - pair.r[0];
    const double top = numerics::simpson_uniform(num, step);
    const double cap = abs_pow(pair.phi.back(), p) * std::max(m.volume - v_star, 0.0) / area;
    const double bottom = numerics::simpson_uniform(den, step) + cap;
    const double ref_bottom = numerics::simpson_uniform(ref, step);

    TransplantReport rep;
    rep.side = Side::FromInner;
    rep.quotient = top / bottom;
    rep.reference_quadrature = top / ref_bottom;
    rep.reference = pair.eigenvalue;
    rep.denominator = bottom * area;
    rep.reference_denominator = ref_bottom * area;
    rep.radial_nodes = M;
    rep.profile_nodes = n;
    rep.tolerance = relative_tolerance(m) * rep.reference;
    classify(rep);
    rep.meta["cap_mass"] = cap * area;
    rep.meta["delta_star"] = d_star;
    rep.meta["denominator_dominance"] = bottom >= ref_bottom * (1.0 - relative_tolerance(m));
    rep.meta["reference_quadrature_gap"] = std::abs(rep.reference_quadrature - rep.reference) / rep.reference;
    rep.meta["clipped"] = m.clipped;
    return rep;
}

nlohmann::json to_json(const TransplantReport& rep) {
    nlohmann::json j;
    j["schema"] = 1;
    j["side"] = geometry::to_string(rep.side);
    j["quotient"] = rep.quotient;
    j["reference"] = rep.reference;
    j["lower_anchor"] = rep.lower_anchor ? nlohmann::json(*rep.lower_anchor) : nlohmann::json(nullptr);
    nlohmann::json margins;
    margins["margin"] = rep.margin;
    margins["relative_margin"] = rep.reference != 0.0 ? rep.margin / rep.reference : rep.margin;
    margins["tolerance"] = rep.tolerance;
    margins["reference_quadrature"] = rep.reference_quadrature;
    margins["verdict"] = to_string(rep.verdict);
    if (rep.area_quotient) margins["area_quotient"] = *rep.area_quotient;
    if (rep.denominator) margins["denominator"] = *rep.denominator;
    if (rep.reference_denominator) margins["reference_denominator"] = *rep.reference_denominator;
    j["margins"] = margins;
    j["grids"] = {{"radial_nodes", rep.radial_nodes}, {"profile_nodes", rep.profile_nodes}};
    j["domain"] = rep.domain;
    j["params"] = rep.params;
    j["meta"] = rep.meta;
    return j;
}

} // namespace rfk::transplant
