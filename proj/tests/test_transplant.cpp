#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles/polar_transplant.hpp"
#include "rfk/numerics.hpp"
#include "rfk/transplant.hpp"

using namespace rfk;
using namespace rfk::geometry;
using namespace rfk::transplant;
using std::numbers::pi;

namespace {

ParamMaps maps_for(const DomainSpec& d, Side side, const ProblemParams& pp, std::size_t grid = 2048) {
    return build_maps(parallel_profile_exact(d, side, pp, grid), pp);
}

radial::RadialProblem reference_problem(const ParamMaps& m, const ProblemParams& pp) {
    radial::RadialProblem pr;
    pr.params = pp;
    pr.R0 = m.R0;
    pr.R1 = m.R1;
    if (m.side == Side::FromOuter) {
        pr.inner = radial::BoundaryCondition::neumann();
        pr.outer = radial::BoundaryCondition::dirichlet();
    } else {
        pr.inner = radial::BoundaryCondition::dirichlet();
        pr.outer = radial::BoundaryCondition::neumann();
    }
    return pr;
}

Loop regular_polygon(double cx, double cy, double r, int n, bool clockwise) {
    Loop loop;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * pi * i / n * (clockwise ? -1.0 : 1.0);
        loop.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
    }
    return loop;
}

} // namespace

TEST_CASE("concentric outer map is r = R1 - delta") {
    for (int N : {2, 3}) {
        const ProblemParams pp(N, 2.0);
        const ParamMaps m = maps_for(DomainSpec(ConcentricAnnulus{0.5, 2.0}, N), Side::FromOuter, pp);
        CHECK(m.R1 == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(m.R0 == doctest::Approx(0.5).epsilon(1e-12));
        double worst = 0.0;
        for (std::size_t i = 0; i < m.delta.size(); ++i) worst = std::max(worst, std::abs(m.r[i] - (2.0 - m.delta[i])));
        CHECK(worst < 1e-11);
        CHECK(m.r.front() == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(m.r.back() == doctest::Approx(0.5).epsilon(1e-10));
        for (std::size_t i = 0; i < m.delta.size(); ++i) CHECK(std::abs(m.h[i] - m.H[i]) < 1e-9 * m.H.front());
    }
}

TEST_CASE("concentric inner maps coincide with the reference") {
    const ProblemParams pp(3, 1.5);
    const ParamMaps m = maps_for(DomainSpec(ConcentricAnnulus{0.5, 2.0}, 3), Side::FromInner, pp);
    CHECK_FALSE(m.clipped);
    CHECK(m.t_omega == doctest::Approx(m.T_hash).epsilon(1e-11));
    for (std::size_t i = 0; i < m.delta.size(); ++i) {
        CHECK(m.t[i] == doctest::Approx(m.T[i]).epsilon(1e-11));
        CHECK(m.g[i] == doctest::Approx(m.G[i]).epsilon(1e-9));
    }
}

TEST_CASE("closed-form Hersch map matches quadrature of S^{1-p'}") {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (int N : {2, 3}) {
            const ProblemParams pp(N, p);
            const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.3}, N), Side::FromInner, pp, 64);
            const double q = 1.0 - pp.p_conj();
            const double T_num = numerics::integrate_gauss(
                [&](double d) { return std::pow(N * pp.unit_ball_volume() * std::pow(0.5 + d, N - 1), q); }, 0.0,
                1.5, 1e-14);
            CHECK(m.T_hash == doctest::Approx(T_num).epsilon(1e-12));
            CHECK(m.T_inverse(m.T_of(0.7)) == doctest::Approx(0.7).epsilon(1e-12));
        }
    }
}

TEST_CASE("inner map invariants on an eccentric annulus") {
    const ProblemParams pp(2, 3.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 1.0}, 2), Side::FromInner, pp);
    for (std::size_t i = 1; i < m.t.size(); ++i) {
        CHECK(m.t[i] > m.t[i - 1]);
        CHECK(m.T[i] > m.T[i - 1]);
    }
    CHECK(m.T_hash <= m.t_omega);
    const VerificationReport rep = check_map_lemmas(m);
    CHECK(rep.meta["g_mass_relative_error"].get<double>() < 1e-3);
}

TEST_CASE("map inversion is exact at the knots") {
    const ProblemParams pp(3, 2.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 1.0}, 3), Side::FromOuter, pp, 512);
    const numerics::PiecewiseLinear v_of(m.delta, m.v);
    for (std::size_t i = 0; i < m.v.size(); ++i)
        CHECK(std::abs(v_of(v_of.inverse(m.v[i])) - m.v[i]) <= 1e-12 * m.volume);
}

TEST_CASE("planar H satisfies H^2 + 4 pi alpha = |Gamma_0|^2") {
    const ProblemParams pp(2, 2.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.75}, 2), Side::FromOuter, pp);
    const double g2 = m.boundary_measure * m.boundary_measure;
    for (std::size_t i = 0; i < m.alpha.size(); ++i)
        CHECK(std::abs(m.H[i] * m.H[i] + 4.0 * pi * m.alpha[i] - g2) <= 1e-10 * g2);
}

TEST_CASE("eccentric outer map has slope at most one") {
    const ProblemParams pp(3, 2.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 1.0}, 3), Side::FromOuter, pp);
    for (std::size_t i = 1; i < m.r.size(); ++i) {
        CHECK(m.r[i] < m.r[i - 1]);
        CHECK(std::abs(m.r[i] - m.r[i - 1]) <= (m.delta[i] - m.delta[i - 1]) * (1.0 + 1e-9));
    }
    const VerificationReport rep = check_map_lemmas(m);
    CHECK(rep.meta["slope_holds"].get<bool>());
    CHECK(rep.meta["max_abs_slope"].get<double>() <= 1.0 + 1e-9);
}

TEST_CASE("map lemmas: equality when concentric, terminal strictness otherwise") {
    for (Side side : {Side::FromOuter, Side::FromInner}) {
        for (int N : {2, 3}) {
            const ProblemParams pp(N, 2.0);
            const VerificationReport eq = check_map_lemmas(maps_for(DomainSpec(ConcentricAnnulus{0.5, 2.0}, N), side, pp));
            CHECK(eq.verdict == Verdict::HoldsWithEquality);
            const VerificationReport strict =
                check_map_lemmas(maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.6}, N), side, pp));
            CHECK(strict.verdict == Verdict::Holds);
            CHECK(strict.meta["strict_terminal_interval"].get<bool>());
            CHECK(strict.meta["alpha0"].get<double>() < strict.grid.back());
        }
    }
}

TEST_CASE("negative isoperimetric radicand is a hard error") {
    const ProblemParams pp(2, 2.0);
    ParallelProfile prof = parallel_profile_exact(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 2), Side::FromOuter, pp, 64);
    for (auto& v : prof.v) v *= 1.5;
    CHECK_THROWS_WITH_AS(build_maps(prof, pp), doctest::Contains("isoperimetric"), NumericalFailure);
}

TEST_CASE("non-monotone v is rectified and flagged") {
    const ProblemParams pp(2, 2.0);
    ParallelProfile prof = parallel_profile_exact(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 2), Side::FromOuter, pp, 64);
    prof.v[10] = prof.v[9] - 1e-6;
    const ParamMaps m = build_maps(prof, pp);
    CHECK(m.rectified);
    for (std::size_t i = 1; i < m.v.size(); ++i) CHECK(m.v[i] >= m.v[i - 1]);
}

TEST_CASE("concentric transplant reproduces the reference eigenvalue") {
    for (int N : {2, 3}) {
        for (double p : {1.5, 2.0, 3.0}) {
            const ProblemParams pp(N, p);
            const DomainSpec d(ConcentricAnnulus{0.5, 2.0}, N);
            for (Side side : {Side::FromOuter, Side::FromInner}) {
                const ParamMaps m = maps_for(d, side, pp);
                const auto pr = reference_problem(m, pp);
                const auto pair = radial::solve_first_radial(pr);
                const TransplantReport rep = side == Side::FromOuter ? transplant_outer(pair, pr, m)
                                                                      : transplant_inner(pair, pr, m);
                CHECK(rep.quotient == doctest::Approx(pair.eigenvalue).epsilon(1e-6));
                CHECK(std::abs(rep.margin) <= 1e-8 * rep.reference);
                CHECK(rep.verdict == Verdict::HoldsWithEquality);
            }
        }
    }
}

TEST_CASE("eccentric outer transplant: strict margin and both proofs agree") {
    const ProblemParams pp(3, 2.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 1.0}, 3), Side::FromOuter, pp);
    const auto pr = reference_problem(m, pp);
    const auto pair = radial::solve_first_radial(pr);
    const TransplantReport rep = transplant_outer(pair, pr, m);
    CHECK(rep.verdict == Verdict::Holds);
    CHECK(rep.margin > 1e-3 * rep.reference);
    REQUIRE(rep.area_quotient);
    CHECK(std::abs(*rep.area_quotient - rep.quotient) <= 1e-4 * rep.quotient);
}

TEST_CASE("outer transplant matches a from-scratch planar quadrature") {
    for (double p : {2.0, 3.0}) {
        for (double e : {0.25, 1.0}) {
            const ProblemParams pp(2, p);
            const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, e}, 2), Side::FromOuter, pp);
            const auto pr = reference_problem(m, pp);
            const auto pair = radial::solve_first_radial(pr);
            const TransplantReport rep = transplant_outer(pair, pr, m);
            const auto o = oracle::polar_transplant_quotient(
                0.5, 2.0, e, p, [&](double r) { return pair.phi_at(r); }, [&](double r) { return pair.dphi_at(r); });
            CHECK(o.volume == doctest::Approx(pi * (4.0 - 0.25)).epsilon(1e-4));
            CHECK(rep.quotient == doctest::Approx(o.quotient).epsilon(2e-4));
        }
    }
}

TEST_CASE("eccentric inner transplant: strict margin and denominator dominance") {
    const ProblemParams pp(2, 3.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 1.0}, 2), Side::FromInner, pp);
    const auto pr = reference_problem(m, pp);
    const auto pair = radial::solve_first_radial(pr);
    const TransplantReport rep = transplant_inner(pair, pr, m);
    CHECK(rep.quotient < pair.eigenvalue);
    CHECK(rep.verdict == Verdict::Holds);
    REQUIRE(rep.denominator);
    CHECK(*rep.denominator >= *rep.reference_denominator);
    CHECK(rep.meta["denominator_dominance"].get<bool>());
}

TEST_CASE("transplant rejects mismatched inputs") {
    const ProblemParams pp(2, 2.0);
    const ParamMaps m = maps_for(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 2), Side::FromOuter, pp, 256);
    auto pr = reference_problem(m, pp);
    const auto pair = radial::solve_first_radial(pr);
    CHECK_THROWS_AS(transplant_inner(pair, pr, m), InvalidInput);
    ParamMaps bad = m;
    bad.volume *= 1.01;
    CHECK_THROWS_WITH_AS(transplant_outer(pair, pr, bad), doctest::Contains("mismatch"), InvalidInput);
    auto shifted = pr;
    shifted.R1 *= 1.01;
    CHECK_THROWS_AS(transplant_outer(pair, shifted, m), InvalidInput);
}

TEST_CASE("verify_rfk verdicts and strictness bookkeeping") {
    const ProblemParams pp(3, 2.0);
    const VerificationReport strict = verify_rfk(DomainSpec(EccentricAnnulus{0.5, 2.0, 1.0}, 3), pp, Side::FromOuter);
    CHECK(strict.check == "theorem1");
    CHECK(strict.verdict == Verdict::Holds);
    CHECK(strict.meta["strictness_matches_translate"].get<bool>());
    const VerificationReport eq = verify_rfk(DomainSpec(ConcentricAnnulus{0.5, 2.0}, 3), pp, Side::FromOuter);
    CHECK(eq.verdict == Verdict::HoldsWithEquality);
    CHECK(eq.meta["strictness_matches_translate"].get<bool>());
    const VerificationReport inner = verify_rfk(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 3), pp, Side::FromInner);
    CHECK(inner.check == "theorem2");
    CHECK(inner.verdict == Verdict::Holds);
}

TEST_CASE("ball domain is its own reference") {
    const ProblemParams pp(2, 2.0);
    const auto out = verify_rfk_detailed(DomainSpec(Ball{1.0}, 2), pp, Side::FromOuter);
    CHECK(out.maps.R0 == 0.0);
    CHECK(out.report.verdict == Verdict::HoldsWithEquality);
}

TEST_CASE("lower anchor above the quotient is reported as a violation") {
    const ProblemParams pp(2, 2.0);
    VerifyOptions opt;
    opt.lower_anchor = 10.0;
    const VerificationReport rep = verify_rfk(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 2), pp, Side::FromOuter, opt);
    CHECK_FALSE(rep.meta["anchor_holds"].get<bool>());
    CHECK(rep.verdict == Verdict::Violated);
}

TEST_CASE("polygonal domains with a near-circular hole") {
    const ProblemParams pp(2, 2.0);
    PolygonWithHoles poly;
    poly.outer = {{-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}};
    poly.holes = {regular_polygon(0.4, 0.2, 0.5, 64, true)};
    const DomainSpec d(poly, 2);
    VerifyOptions opt;
    opt.polygon_grid = 256;
    opt.field_resolution = 512;
    const VerificationReport inner = verify_rfk(d, pp, Side::FromInner, opt);
    CHECK(inner.check == "theorem3");
    CHECK(inner.verdict == Verdict::Holds);
    CHECK(inner.meta["translate_test"] == "inconclusive");
    const VerificationReport outer = verify_rfk(d, pp, Side::FromOuter, opt);
    CHECK(outer.verdict == Verdict::Holds);
}

TEST_CASE("elasticity reference uses the Robin condition") {
    const ProblemParams pp(3, 2.0);
    VerifyOptions opt;
    opt.outer = radial::BoundaryCondition::robin(1.0);
    const auto out = verify_rfk_detailed(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 3), pp, Side::FromOuter, opt);
    CHECK(out.report.check == "elasticity");
    CHECK(out.report.verdict == Verdict::Holds);
    CHECK(out.transplant.reference == doctest::Approx(radial::rayleigh_radial(out.pair, out.problem)).epsilon(1e-6));
}

TEST_CASE("report serialization") {
    const ProblemParams pp(2, 2.0);
    const auto out = verify_rfk_detailed(DomainSpec(EccentricAnnulus{0.5, 2.0, 0.5}, 2), pp, Side::FromOuter);
    const auto j = to_json(out.transplant);
    for (const char* key : {"side", "quotient", "reference", "lower_anchor", "margins", "grids", "domain", "params"})
        CHECK(j.contains(key));
    CHECK(j["lower_anchor"].is_null());
    const std::string csv = maps_csv(out.maps);
    CHECK(csv.rfind("delta,r,alpha,h,H\n", 0) == 0);
}
