#include <algorithm>
#include <cmath>

#include "rfk/transplant.hpp"

namespace rfk::transplant {

namespace {

std::string check_name(const geometry::DomainSpec& domain, Side side, const VerifyOptions& opt) {
    if (domain.is_polygon()) return "theorem3";
    if (side == Side::FromInner) return "theorem2";
    return opt.outer.kind == radial::BcKind::Robin ? "elasticity" : "theorem1";
}

} // namespace

RfkOutcome verify_rfk_detailed(const geometry::DomainSpec& domain, const ProblemParams& params, Side side,
                               const VerifyOptions& opt) {
    if (domain.dim() != params.dim()) throw InvalidInput("domain and problem dimensions differ");
    if (domain.is_polygon() && params.dim() != 2) throw InvalidInput("polygonal domains are planar");
    if (side == Side::FromOuter && opt.outer.kind == radial::BcKind::Neumann)
        throw InvalidInput("the outer condition on Omega^# must be Dirichlet or Robin");

    RfkOutcome out;
    const geometry::DomainSpec ref = geometry::reference_annulus(domain, side);
    const geometry::ParallelProfile profile =
        domain.is_polygon() ? geometry::parallel_profile_polygon(domain, side, opt.polygon_grid, opt.field_resolution)
                            : geometry::parallel_profile_exact(domain, side, params, opt.profile_grid);

    VerificationReport& rep = out.report;
    rep.check = check_name(domain, side, opt);
    rep.meta["side"] = geometry::to_string(side);
    rep.meta["domain"] = geometry::to_json(domain);
    rep.meta["reference_domain"] = geometry::to_json(ref);
    rep.meta["params"] = {{"dim", params.dim()}, {"p", params.p()}};
    rep.meta["profile"] = geometry::profile_metadata(profile);

    if (side == Side::FromOuter) {
        const VerificationReport iso = geometry::check_isoperimetric(profile, params);
        rep.meta["isoperimetric"] = to_json(iso);
        if (!iso.holds()) {
            rep.margins = {iso.worst_margin};
            rep.tolerance = iso.tolerance;
            finalize(rep);
            rep.verdict = Verdict::Violated;
            rep.meta["reason"] = "isoperimetric check failed; r(delta) is not defined";
            return out;
        }
    }

    out.maps = build_maps(profile, params);
    out.lemmas = check_map_lemmas(out.maps);
    rep.meta["lemmas"] = to_json(out.lemmas);

    radial::RadialProblem& pr = out.problem;
    pr.params = params;
    pr.R0 = out.maps.R0;
    pr.R1 = out.maps.R1;
    if (side == Side::FromOuter) {
        pr.inner = radial::BoundaryCondition::neumann();
        pr.outer = opt.outer;
    } else {
        pr.inner = radial::BoundaryCondition::dirichlet();
        pr.outer = radial::BoundaryCondition::neumann();
    }
    out.pair = radial::solve_first_radial(pr, opt.solver);
    out.transplant = side == Side::FromOuter ? transplant_outer(out.pair, pr, out.maps)
                                             : transplant_inner(out.pair, pr, out.maps);
    TransplantReport& tr = out.transplant;
    if (domain.is_polygon()) {
        // The contouring tolerance on s is far looser than the quotient error;
        // use the change under halved resolution instead.
        const geometry::ParallelProfile coarse = geometry::parallel_profile_polygon(
            domain, side, opt.polygon_grid / 2 + 1, std::max<std::size_t>(opt.field_resolution / 2, 16));
        const ParamMaps cm = build_maps(coarse, params);
        const TransplantReport ct = side == Side::FromOuter ? transplant_outer(out.pair, pr, cm)
                                                            : transplant_inner(out.pair, pr, cm);
        tr.meta["coarse_quotient"] = ct.quotient;
        tr.tolerance = std::max(1e-8 * tr.reference, 2.0 * std::abs(tr.quotient - ct.quotient));
        classify(tr);
    }
    tr.lower_anchor = opt.lower_anchor;
    tr.domain = geometry::to_json(domain);
    tr.params = rep.meta["params"];

    rep.grid = {0.0};
    rep.margins = {tr.margin / tr.reference};
    rep.tolerance = tr.tolerance / tr.reference;
    finalize(rep);
    rep.meta["margin_units"] = "relative";
    rep.meta["quotient"] = tr.quotient;
    rep.meta["reference"] = tr.reference;
    rep.meta["transplant"] = to_json(tr);
    if (tr.lower_anchor) {
        const bool ok = *tr.lower_anchor <= tr.quotient * (1.0 + opt.anchor_tolerance);
        rep.meta["lower_anchor"] = *tr.lower_anchor;
        rep.meta["anchor_holds"] = ok;
        if (!ok) rep.verdict = Verdict::Violated;
    }
    if (!out.lemmas.holds()) {
        rep.meta["reason"] = "map lemma check failed";
        rep.verdict = Verdict::Violated;
    }
    if (domain.is_polygon()) {
        rep.meta["translate_test"] = "inconclusive";
    } else {
        // A spherical domain is a translate of its reference iff it is concentric.
        const bool translate = domain.spherical().e == 0.0;
        rep.meta["translate"] = translate;
        rep.meta["strictness_matches_translate"] = (rep.verdict == Verdict::Holds) == !translate;
    }
    return out;
}

VerificationReport verify_rfk(const geometry::DomainSpec& domain, const ProblemParams& params, Side side,
                              const VerifyOptions& options) {
    return verify_rfk_detailed(domain, params, side, options).report;
}

} // namespace rfk::transplant
