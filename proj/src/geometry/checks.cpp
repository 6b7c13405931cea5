#include <algorithm>
#include <cmath>
#include <numbers>

#include "rfk/geometry.hpp"

namespace rfk::geometry {

namespace {

void require_profile(const ParallelProfile& profile) {
    const std::size_t n = profile.delta.size();
    if (n < 2 || profile.s.size() != n || profile.v.size() != n || profile.S.size() != n || profile.V.size() != n)
        throw InvalidInput("malformed profile: inconsistent array sizes");
    if (profile.stochastic() && (profile.s_stderr.size() != n || profile.v_stderr.size() != n))
        throw InvalidInput("malformed profile: standard error arrays");
    for (std::size_t i = 1; i < n; ++i)
        if (!(profile.delta[i] > profile.delta[i - 1])) throw InvalidInput("malformed profile: delta not increasing");
}

nlohmann::json base_meta(const ParallelProfile& profile) {
    nlohmann::json meta;
    meta["profile"] = profile_metadata(profile);
    meta["margin_units"] = profile.stochastic() ? "standard_errors" : "relative";
    return meta;
}

} // namespace

VerificationReport check_nagy(const ParallelProfile& profile, const ProblemParams& params) {
    require_profile(profile);
    VerificationReport rep;
    rep.check = "nagy";
    rep.grid = profile.delta;
    rep.meta = base_meta(profile);
    const bool planar = params.dim() == 2;
    rep.meta["form"] = planar ? (profile.side == Side::FromOuter ? "|G0| - 2 pi d" : "|G1| + 2 pi d") : "S(d)";
    const double L = profile.boundary_measure;
    const double sign = profile.side == Side::FromOuter ? -1.0 : 1.0;
    rep.margins.resize(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double bound = planar ? L + sign * 2.0 * std::numbers::pi * profile.delta[i] : profile.S[i];
        const double slack = bound - profile.s[i];
        if (profile.stochastic())
            rep.margins[i] = slack / std::max(profile.s_stderr[i], 1e-12 * L);
        else
            rep.margins[i] = slack / L;
    }
    rep.tolerance = profile.stochastic() ? 3.0 : profile.relative_tolerance;
    finalize(rep);
    return rep;
}

VerificationReport check_isoperimetric(const ParallelProfile& profile, const ProblemParams& params) {
    require_profile(profile);
    if (profile.side != Side::FromOuter) throw InvalidInput("isoperimetric check applies to outer parallels");
    if (params.dim() < 2) throw InvalidInput("isoperimetric check needs N >= 2");
    VerificationReport rep;
    rep.check = "isoperimetric";
    rep.grid = profile.delta;
    rep.meta = base_meta(profile);
    const double nc = params.dim_conj();
    const double C = params.iso_constant();
    const double top = std::pow(profile.boundary_measure, nc);
    rep.margins.resize(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double s = std::max(profile.s[i], 0.0);
        const double slack = top - C * profile.v[i] - std::pow(s, nc);
        if (profile.stochastic()) {
            const double sd_v = C * profile.v_stderr[i];
            const double sd_s = nc * std::pow(s, nc - 1.0) * profile.s_stderr[i];
            rep.margins[i] = slack / std::max(std::hypot(sd_v, sd_s), 1e-12 * top);
        } else {
            rep.margins[i] = slack / top;
        }
    }
    rep.tolerance = profile.stochastic() ? 3.0 : profile.relative_tolerance;
    finalize(rep);
    // delta0: start of the terminal run of strictly positive margins.
    std::size_t first_strict = profile.size();
    while (first_strict > 0 && rep.margins[first_strict - 1] > rep.tolerance) --first_strict;
    const bool has_strict = first_strict < profile.size();
    rep.meta["delta0"] = has_strict ? profile.delta[first_strict] : profile.delta_omega;
    rep.meta["delta0_index"] = first_strict;
    rep.meta["strict_terminal_interval"] = has_strict;
    return rep;
}

} // namespace rfk::geometry
