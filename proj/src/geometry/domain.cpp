#include <cmath>
#include <sstream>

#include "rfk/geometry.hpp"
#include "rfk/io.hpp"
#include "rfk/polygon.hpp"

namespace rfk::geometry {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput(std::string(what) + " must be positive and finite");
}

} // namespace

DomainSpec::DomainSpec(Shape shape, int dim) : shape_(std::move(shape)), dim_(dim) {
    if (dim < 2) throw InvalidInput("domains need dimension >= 2");
    std::visit(Overloaded{
                   [](const Ball& b) { require_positive(b.R1, "R1"); },
                   [](const ConcentricAnnulus& a) {
                       require_positive(a.R0, "R0");
                       require_positive(a.R1, "R1");
                       if (!(a.R0 < a.R1)) throw InvalidInput("annulus needs R0 < R1");
                   },
                   [](const EccentricAnnulus& a) {
                       require_positive(a.R0, "R0");
                       require_positive(a.R1, "R1");
                       if (!(a.e >= 0.0) || !std::isfinite(a.e)) throw InvalidInput("offset e must be >= 0");
                       if (!(a.e + a.R0 < a.R1)) throw InvalidInput("hole must lie strictly inside: e + R0 < R1");
                   },
                   [this](const PolygonWithHoles& p) {
                       if (dim_ != 2) throw InvalidInput("polygon domains are planar");
                       polygon::validate(p);
                   },
               },
               shape_);
}

bool DomainSpec::has_hole() const {
    if (std::holds_alternative<Ball>(shape_)) return false;
    if (const auto* p = std::get_if<PolygonWithHoles>(&shape_)) return !p->holes.empty();
    return true;
}

SphericalShape DomainSpec::spherical() const {
    return std::visit(Overloaded{
                          [](const Ball& b) { return SphericalShape{0.0, b.R1, 0.0}; },
                          [](const ConcentricAnnulus& a) { return SphericalShape{a.R0, a.R1, 0.0}; },
                          [](const EccentricAnnulus& a) { return SphericalShape{a.R0, a.R1, a.e}; },
                          [](const PolygonWithHoles&) -> SphericalShape {
                              throw InvalidInput("polygon domain has no spherical parameters");
                          },
                      },
                      shape_);
}

const PolygonWithHoles& DomainSpec::polygon() const {
    const auto* p = std::get_if<PolygonWithHoles>(&shape_);
    if (!p) throw InvalidInput("domain is not a polygon");
    return *p;
}

std::string DomainSpec::kind() const {
    return std::visit(Overloaded{
                          [](const Ball&) { return std::string("ball"); },
                          [](const ConcentricAnnulus&) { return std::string("concentric_annulus"); },
                          [](const EccentricAnnulus&) { return std::string("eccentric_annulus"); },
                          [](const PolygonWithHoles&) { return std::string("polygon"); },
                      },
                      shape_);
}

std::string to_string(Side side) { return side == Side::FromOuter ? "outer" : "inner"; }

Side side_from_string(const std::string& name) {
    if (name == "outer" || name == "FromOuter") return Side::FromOuter;
    if (name == "inner" || name == "FromInner") return Side::FromInner;
    throw InvalidInput("unknown side '" + name + "' (expected outer or inner)");
}

Measures measures(const DomainSpec& domain) {
    Measures m;
    if (domain.is_polygon()) {
        const auto& poly = domain.polygon();
        m.volume = std::abs(polygon::signed_area(poly.outer));
        m.outer_measure = polygon::perimeter(poly.outer);
        for (std::size_t i = 0; i < poly.holes.size(); ++i) {
            m.volume -= std::abs(polygon::signed_area(poly.holes[i]));
            const double len = polygon::perimeter(poly.holes[i]);
            m.inner_measure += len;
            if (i == 0) m.designated_hole_measure = len;
        }
        return m;
    }
    const ProblemParams geo(domain.dim(), 2.0);
    const SphericalShape s = domain.spherical();
    m.volume = geo.ball_volume(s.R1) - (s.R0 > 0.0 ? geo.ball_volume(s.R0) : 0.0);
    m.outer_measure = geo.sphere_measure(s.R1);
    m.inner_measure = s.R0 > 0.0 ? geo.sphere_measure(s.R0) : 0.0;
    m.designated_hole_measure = m.inner_measure;
    return m;
}

DomainSpec reference_annulus(const DomainSpec& domain, Side side) {
    const int n = domain.dim();
    const ProblemParams geo(n, 2.0);
    const Measures m = measures(domain);
    const double w = geo.unit_ball_volume();
    if (side == Side::FromOuter) {
        const double R1 = geo.radius_for_measure(m.outer_measure);
        const double outer_vol = std::pow(R1, n);
        const double radicand = outer_vol - m.volume / w;
        if (radicand < -1e-12 * outer_vol)
            throw NumericalFailure("no annulus with the given outer measure and volume: volume exceeds the ball");
        if (radicand <= 1e-12 * outer_vol) return DomainSpec(Ball{R1}, n);
        return DomainSpec(ConcentricAnnulus{std::pow(radicand, 1.0 / n), R1}, n);
    }
    if (!domain.has_hole()) throw InvalidInput("inner reference annulus needs a hole");
    const double R0 = geo.radius_for_measure(m.designated_hole_measure);
    const double R1 = std::pow(std::pow(R0, n) + m.volume / w, 1.0 / n);
    return DomainSpec(ConcentricAnnulus{R0, R1}, n);
}

double reference_measure(Side side, const ProblemParams& params, double reference_radius, double delta) {
    const double rho = side == Side::FromOuter ? std::max(reference_radius - delta, 0.0) : reference_radius + delta;
    return params.sphere_measure(rho);
}

double reference_volume(Side side, const ProblemParams& params, double reference_radius, double delta) {
    if (side == Side::FromOuter) {
        const double rho = std::max(reference_radius - delta, 0.0);
        return params.ball_volume(reference_radius) - params.ball_volume(rho);
    }
    return params.ball_volume(reference_radius + delta) - params.ball_volume(reference_radius);
}

nlohmann::json to_json(const DomainSpec& domain) {
    nlohmann::json j;
    j["kind"] = domain.kind();
    j["dim"] = domain.dim();
    if (domain.is_polygon()) {
        const auto& poly = domain.polygon();
        j["outer"] = poly.outer;
        j["holes"] = poly.holes;
    } else {
        const SphericalShape s = domain.spherical();
        j["R0"] = s.R0;
        j["R1"] = s.R1;
        j["e"] = s.e;
    }
    return j;
}

nlohmann::json profile_metadata(const ParallelProfile& profile) {
    nlohmann::json j;
    j["schema"] = 1;
    j["side"] = to_string(profile.side);
    j["dim"] = profile.dim;
    j["method"] = profile.method;
    j["grid_size"] = profile.delta.size();
    j["delta_omega"] = profile.delta_omega;
    j["domain_volume"] = profile.domain_volume;
    j["boundary_measure"] = profile.boundary_measure;
    j["reference_radius"] = profile.reference_radius;
    j["quadrature_error"] = profile.quadrature_error;
    j["relative_tolerance"] = profile.relative_tolerance;
    j["rectified"] = profile.rectified;
    j["seed"] = profile.seed;
    j["samples"] = profile.samples;
    j["field_resolution"] = profile.field_resolution;
    j["stochastic"] = profile.stochastic();
    j["kinks"] = profile.kinks;
    return j;
}

std::string profile_csv(const ParallelProfile& profile) {
    std::ostringstream out;
    out << "delta,s,v,S,V\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        out << io::fmt(profile.delta[i]) << ',' << io::fmt(profile.s[i]) << ',' << io::fmt(profile.v[i]) << ','
            << io::fmt(profile.S[i]) << ',' << io::fmt(profile.V[i]) << '\n';
    }
    return out.str();
}

} // namespace rfk::geometry
