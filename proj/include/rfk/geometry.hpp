#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rfk/common.hpp"
#include "rfk/report.hpp"

namespace rfk::geometry {

using Point2 = std::array<double, 2>;
using Loop = std::vector<Point2>;

struct Ball {
    double R1;
};
struct ConcentricAnnulus {
    double R0, R1;
};
/// Hole of radius R0 centred at (e, 0, ..., 0) inside the ball of radius R1
/// centred at the origin.
struct EccentricAnnulus {
    double R0, R1, e;
};
/// Planar domain; the first hole is the designated inner boundary Gamma_1.
struct PolygonWithHoles {
    Loop outer;
    std::vector<Loop> holes;
};

/// Radii and offset of a spherical domain (R0 = 0, e = 0 for a ball).
struct SphericalShape {
    double R0 = 0.0;
    double R1 = 0.0;
    double e = 0.0;
};

class DomainSpec {
public:
    using Shape = std::variant<Ball, ConcentricAnnulus, EccentricAnnulus, PolygonWithHoles>;

    /// Validates the shape invariants; throws InvalidInput on violation.
    DomainSpec(Shape shape, int dim);

    const Shape& shape() const { return shape_; }
    int dim() const { return dim_; }
    bool is_polygon() const { return std::holds_alternative<PolygonWithHoles>(shape_); }
    bool has_hole() const;
    /// Throws InvalidInput for polygons.
    SphericalShape spherical() const;
    const PolygonWithHoles& polygon() const;
    std::string kind() const;

private:
    Shape shape_;
    int dim_;
};

enum class Side { FromOuter, FromInner };
std::string to_string(Side side);
Side side_from_string(const std::string& name);

struct Measures {
    double volume = 0.0;
    /// |Gamma_0|
    double outer_measure = 0.0;
    /// Sum over all hole boundaries.
    double inner_measure = 0.0;
    /// |Gamma_1|, the designated hole.
    double designated_hole_measure = 0.0;
};

Measures measures(const DomainSpec& domain);

/// Concentric annulus (or ball, when the matching inner radius is zero) with
/// the same volume and the same outer (FromOuter) or designated inner
/// (FromInner) boundary measure. Throws NumericalFailure when infeasible.
DomainSpec reference_annulus(const DomainSpec& domain, Side side);

/// Sampled measures of the interior parallels to one boundary.
struct ParallelProfile {
    Side side = Side::FromOuter;
    int dim = 2;
    std::vector<double> delta;
    std::vector<double> s;
    std::vector<double> v;
    /// Reference parallel measure N w_N (R1 - d)^{N-1} or N w_N (R0 + d)^{N-1},
    /// with radii taken from the boundary measure (Nagy's bound when N = 2).
    std::vector<double> S;
    std::vector<double> V;
    /// Per-point standard errors (stochastic profiles only).
    std::vector<double> s_stderr;
    std::vector<double> v_stderr;
    double delta_omega = 0.0;
    double domain_volume = 0.0;
    double boundary_measure = 0.0;
    /// Radius of the sphere whose measure equals boundary_measure.
    double reference_radius = 0.0;
    std::string method;
    /// Absolute error bound on v from the quadrature used.
    double quadrature_error = 0.0;
    /// Estimator tolerance for s relative to boundary_measure (deterministic
    /// profiles); stochastic profiles use standard errors instead.
    double relative_tolerance = 1e-9;
    bool rectified = false;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t field_resolution = 0;
    /// Analytic s(delta) and its kinks; set by the exact path only.
    std::function<double(double)> exact_s;
    std::vector<double> kinks;

    bool stochastic() const { return !s_stderr.empty(); }
    std::size_t size() const { return delta.size(); }
};

/// Reference measure S(delta) and volume V(delta) for a profile side.
double reference_measure(Side side, const ProblemParams& params, double reference_radius, double delta);
double reference_volume(Side side, const ProblemParams& params, double reference_radius, double delta);

/// Closed-form interior-parallel measure for balls and (eccentric) annuli.
double spherical_parallel_measure(const SphericalShape& shape, Side side, const ProblemParams& params,
                                  double delta);
/// Exhaustion depth delta_Omega of a spherical domain.
double spherical_exhaustion_depth(const SphericalShape& shape, Side side);
/// Measure of the cap of half-angle theta on a sphere of radius rho in R^N.
double spherical_cap_measure(const ProblemParams& params, double rho, double theta);

ParallelProfile parallel_profile_exact(const DomainSpec& domain, Side side, const ProblemParams& params,
                                       std::size_t grid_size = 2048);

struct MonteCarloOptions {
    std::size_t grid_size = 256;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    /// Upper end of the delta grid; defaults to the largest sampled distance.
    std::optional<double> delta_max;
    std::size_t threads = 1;
};

ParallelProfile parallel_profile_mc(const DomainSpec& domain, Side side, const MonteCarloOptions& options);

/// Deterministic uniform variate in [0, 1) from (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

ParallelProfile parallel_profile_polygon(const DomainSpec& domain, Side side, std::size_t grid_size = 512,
                                         std::size_t field_resolution = 1024);

/// Nagy-type bound s <= |Gamma_0| - 2 pi d (FromOuter) or s <= |Gamma_1| + 2 pi d
/// (FromInner) in the plane; s <= S for spherical boundaries in any dimension.
VerificationReport check_nagy(const ParallelProfile& profile, const ProblemParams& params);

/// s^{N'} <= |Gamma_0|^{N'} - C(N) v on the profile grid (FromOuter only).
/// meta["delta0"] is the start of the terminal interval of strict inequality.
VerificationReport check_isoperimetric(const ParallelProfile& profile, const ProblemParams& params);

nlohmann::json to_json(const DomainSpec& domain);
nlohmann::json profile_metadata(const ParallelProfile& profile);
/// CSV with header `delta,s,v,S,V`.
std::string profile_csv(const ParallelProfile& profile);

} // namespace rfk::geometry
