#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfk/common.hpp"
#include "rfk/geometry.hpp"
#include "rfk/radial.hpp"
#include "rfk/report.hpp"

namespace rfk::transplant {

using geometry::Side;

/// Transplantation maps sampled on the profile grid. Every map is a
/// piecewise-linear interpolant over these knots.
struct ParamMaps {
    Side side = Side::FromOuter;
    int dim = 2;
    double p = 2.0;
    /// Radii of the reference annulus (R0 = 0 for a ball).
    double R0 = 0.0;
    double R1 = 0.0;
    double volume = 0.0;
    double boundary_measure = 0.0;
    double delta_omega = 0.0;
    /// Profile knots (after monotone rectification of v).
    std::vector<double> delta, s, v;
    bool rectified = false;
    bool exact_profile = false;
    /// Absolute tolerance on s and on v used by the lemma checks.
    double s_tolerance = 0.0;
    double v_tolerance = 0.0;

    /// FromOuter: r(delta) and the area-parameter pair h = s o v^{-1},
    /// H = S o V^{-1}, sampled at alpha = v(delta).
    std::vector<double> r;
    std::vector<double> alpha;
    std::vector<double> h, H;

    /// FromInner: t(delta), T(delta) and g = s o t^{-1}, G = S o T^{-1},
    /// sampled at alpha = t(delta). T and G are only meaningful for
    /// alpha <= T_hash.
    std::vector<double> t, T;
    std::vector<double> g, G;
    double T_hash = 0.0;
    double t_omega = 0.0;
    /// s was floored at clip_floor somewhere on the grid.
    bool clipped = false;
    double clip_floor = 0.0;
    double clipped_length = 0.0;

    /// Closed-form Hersch map of the reference annulus and its inverse.
    double T_of(double d) const;
    double T_inverse(double a) const;
    /// Linear interpolation of the profile in delta.
    double s_at(double d) const;
    double v_at(double d) const;
};

/// Throws InvalidInput when the profile is too short and NumericalFailure
/// when the isoperimetric radicand is negative beyond tolerance.
ParamMaps build_maps(const geometry::ParallelProfile& profile, const ProblemParams& params);

/// FromOuter: |r'| <= 1 by finite differences and h <= H. FromInner: g <= G
/// on [0, T_hash]. meta["alpha0"] is the start of the terminal strict run.
VerificationReport check_map_lemmas(const ParamMaps& maps);

struct TransplantReport {
    Side side = Side::FromOuter;
    double quotient = 0.0;
    /// Eigenvalue of the reference annulus.
    double reference = 0.0;
    /// Reference eigenfunction's own quotient under the same quadrature.
    double reference_quadrature = 0.0;
    std::optional<double> lower_anchor;
    /// reference_quadrature - quotient.
    double margin = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Holds;
    /// FromOuter: quotient of u = phi o v in the area parameter.
    std::optional<double> area_quotient;
    /// FromInner: transplanted and reference L^p masses (up to N w_N).
    std::optional<double> denominator;
    std::optional<double> reference_denominator;
    std::size_t radial_nodes = 0;
    std::size_t profile_nodes = 0;
    nlohmann::json domain = nlohmann::json::object();
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json meta = nlohmann::json::object();
};

/// Recomputes margin and verdict from quotient, reference_quadrature and tolerance.
void classify(TransplantReport& report);

/// Radial pair on Omega^# (Neumann or regular inner, Dirichlet or Robin outer).
TransplantReport transplant_outer(const radial::RadialEigenpair& pair, const radial::RadialProblem& problem,
                                  const ParamMaps& maps);
/// Radial pair on Omega_# (Dirichlet inner, Neumann outer).
TransplantReport transplant_inner(const radial::RadialEigenpair& pair, const radial::RadialProblem& problem,
                                  const ParamMaps& maps);

nlohmann::json to_json(const TransplantReport& report);
/// CSV of the map knots; columns depend on the side.
std::string maps_csv(const ParamMaps& maps);
nlohmann::json maps_metadata(const ParamMaps& maps);

struct VerifyOptions {
    std::size_t profile_grid = 2048;
    std::size_t polygon_grid = 512;
    std::size_t field_resolution = 1024;
    /// Outer condition on Omega^#; Robin gives the elasticity problem.
    radial::BoundaryCondition outer = radial::BoundaryCondition::dirichlet();
    std::optional<double> lower_anchor;
    /// Relative allowance for the lower anchor.
    double anchor_tolerance = 5e-3;
    radial::SolverOptions solver;
};

struct RfkOutcome {
    VerificationReport report;
    TransplantReport transplant;
    ParamMaps maps;
    VerificationReport lemmas;
    radial::RadialProblem problem;
    radial::RadialEigenpair pair;
};

/// reference_annulus -> profile -> maps -> radial solve -> transplant.
RfkOutcome verify_rfk_detailed(const geometry::DomainSpec& domain, const ProblemParams& params, Side side,
                               const VerifyOptions& options = {});
VerificationReport verify_rfk(const geometry::DomainSpec& domain, const ProblemParams& params, Side side,
                              const VerifyOptions& options = {});

} // namespace rfk::transplant
