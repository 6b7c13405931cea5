#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rfk/geometry.hpp"
#include "rfk/kernels.hpp"
#include "rfk/numerics.hpp"
#include "rfk/polygon.hpp"

namespace rfk::geometry {

namespace {

struct Grid {
    double x0 = 0.0, y0 = 0.0, h = 0.0;
    std::size_t nx = 0, ny = 0;
    double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
    double y(std::size_t j) const { return y0 + h * static_cast<double>(j); }
    std::size_t at(std::size_t i, std::size_t j) const { return j * nx + i; }
};

// Signed distance to one loop, positive on the side selected by `inside_positive`.
std::vector<double> signed_field(const Grid& g, const Loop& loop, bool inside_positive) {
    polygon::SegmentArrays segs;
    segs.append(loop);
    const kernels::SegmentSet set{segs.ax, segs.ay, segs.dx, segs.dy, segs.inv_len2};
    std::vector<double> out(g.nx * g.ny);
    std::vector<double> px(g.nx), py(g.nx), d2(g.nx);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            px[i] = g.x(i);
            py[i] = g.y(j);
        }
        kernels::segment_distance_sq(px, py, set, d2);
        for (std::size_t i = 0; i < g.nx; ++i) {
            const bool inside = polygon::contains(loop, px[i], py[i]);
            const double d = std::sqrt(d2[i]);
            out[g.at(i, j)] = inside == inside_positive ? d : -d;
        }
    }
    return out;
}

struct EdgePoint {
    double x, y, other;
};

EdgePoint cut(double xa, double ya, double fa, double oa, double xb, double yb, double fb, double ob, double level) {
    const double t = (level - fa) / (fb - fa);
    return {xa + t * (xb - xa), ya + t * (yb - ya), oa + t * (ob - oa)};
}

double clipped_length(const EdgePoint& a, const EdgePoint& b) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (a.other >= 0.0 && b.other >= 0.0) return len;
    if (a.other < 0.0 && b.other < 0.0) return 0.0;
    const double pos = a.other >= 0.0 ? a.other : b.other;
    const double neg = a.other >= 0.0 ? b.other : a.other;
    return len * pos / (pos - neg);
}

// Length of the level-`level` contour inside one cell, restricted to other >= 0.
// Corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1).
double cell_contour(const double* xs, const double* ys, const double* f, const double* o, double level) {
    bool up[4];
    for (int k = 0; k < 4; ++k) up[k] = f[k] >= level;
    auto edge = [&](int a, int b) { return cut(xs[a], ys[a], f[a], o[a], xs[b], ys[b], f[b], o[b], level); };
    // Edges: e0 = (0,1), e1 = (1,2), e2 = (2,3), e3 = (3,0).
    const int ea[4] = {0, 1, 2, 3};
    const int eb[4] = {1, 2, 3, 0};
    int crossing[4];
    int nc = 0;
    for (int k = 0; k < 4; ++k)
        if (up[ea[k]] != up[eb[k]]) crossing[nc++] = k;
    if (nc == 2) return clipped_length(edge(ea[crossing[0]], eb[crossing[0]]), edge(ea[crossing[1]], eb[crossing[1]]));
    if (nc != 4) return 0.0;
    const bool centre_up = 0.25 * (f[0] + f[1] + f[2] + f[3]) >= level;
    const EdgePoint p0 = edge(0, 1), p1 = edge(1, 2), p2 = edge(2, 3), p3 = edge(3, 0);
    if (centre_up == up[0]) return clipped_length(p0, p1) + clipped_length(p2, p3);
    return clipped_length(p3, p0) + clipped_length(p1, p2);
}

} // namespace

ParallelProfile parallel_profile_polygon(const DomainSpec& domain, Side side, std::size_t grid_size,
                                         std::size_t field_resolution) {
    if (!domain.is_polygon()) throw InvalidInput("polygon profile needs a polygon domain");
    if (grid_size < 16) throw InvalidInput("profile grid_size must be >= 16");
    if (field_resolution < 16) throw InvalidInput("field_resolution must be >= 16");
    const auto& poly = domain.polygon();
    if (side == Side::FromInner && poly.holes.empty()) throw InvalidInput("inner parallels need a hole");

    double x0 = poly.outer[0][0], x1 = x0, y0 = poly.outer[0][1], y1 = y0;
    for (const auto& p : poly.outer) {
        x0 = std::min(x0, p[0]);
        x1 = std::max(x1, p[0]);
        y0 = std::min(y0, p[1]);
        y1 = std::max(y1, p[1]);
    }
    Grid g;
    g.h = std::max(x1 - x0, y1 - y0) / static_cast<double>(field_resolution);
    const std::size_t pad = 2;
    g.x0 = x0 - static_cast<double>(pad) * g.h;
    g.y0 = y0 - static_cast<double>(pad) * g.h;
    g.nx = static_cast<std::size_t>(std::ceil((x1 - x0) / g.h)) + 1 + 2 * pad;
    g.ny = static_cast<std::size_t>(std::ceil((y1 - y0) / g.h)) + 1 + 2 * pad;

    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < poly.holes.size(); ++a) {
        gap = std::min(gap, polygon::loop_gap(poly.outer, poly.holes[a]));
        for (std::size_t b = 0; b < a; ++b) gap = std::min(gap, polygon::loop_gap(poly.holes[a], poly.holes[b]));
    }
    if (gap < 4.0 * g.h) {
        std::ostringstream msg;
        msg << "field_resolution " << field_resolution << " too coarse: narrowest gap " << gap << " spans "
            << gap / g.h << " cells (need >= 4)";
        throw InvalidInput(msg.str());
    }

    const std::size_t nodes = g.nx * g.ny;
    std::vector<double> f;
    std::vector<double> other(nodes, 1e300);
    auto fold_other = [&](const std::vector<double>& field) {
        for (std::size_t k = 0; k < nodes; ++k) other[k] = std::min(other[k], field[k]);
    };
    if (side == Side::FromOuter) {
        f = signed_field(g, poly.outer, true);
        for (const auto& hole : poly.holes) fold_other(signed_field(g, hole, false));
    } else {
        f = signed_field(g, poly.holes[0], false);
        fold_other(signed_field(g, poly.outer, true));
        for (std::size_t k = 1; k < poly.holes.size(); ++k) fold_other(signed_field(g, poly.holes[k], false));
    }

    double dmax = 0.0;
    for (std::size_t k = 0; k < nodes; ++k)
        if (other[k] >= 0.0 && f[k] > dmax) dmax = f[k];
    if (!(dmax > 0.0)) throw NumericalFailure("distance field has no interior nodes");

    const Measures m = measures(domain);
    ParallelProfile prof;
    prof.side = side;
    prof.dim = 2;
    prof.method = "polygon_contour";
    prof.field_resolution = field_resolution;
    prof.domain_volume = m.volume;
    prof.boundary_measure = side == Side::FromOuter ? m.outer_measure : m.designated_hole_measure;
    const ProblemParams geo(2, 2.0);
    prof.reference_radius = geo.radius_for_measure(prof.boundary_measure);
    prof.delta_omega = dmax;
    prof.relative_tolerance = 0.02;
    prof.delta = numerics::linspace(0.0, dmax, grid_size);
    const double step = prof.delta[1];
    const std::size_t n = grid_size;
    prof.s.assign(n, 0.0);

    for (std::size_t j = 0; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            const std::size_t c[4] = {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
            const double fv[4] = {f[c[0]], f[c[1]], f[c[2]], f[c[3]]};
            const double lo = std::min({fv[0], fv[1], fv[2], fv[3]});
            const double hi = std::max({fv[0], fv[1], fv[2], fv[3]});
            if (hi <= 0.0 || lo == hi) continue;
            const double ov[4] = {other[c[0]], other[c[1]], other[c[2]], other[c[3]]};
            if (std::max({ov[0], ov[1], ov[2], ov[3]}) < 0.0) continue;
            const double xs[4] = {g.x(i), g.x(i + 1), g.x(i + 1), g.x(i)};
            const double ys[4] = {g.y(j), g.y(j), g.y(j + 1), g.y(j + 1)};
            const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(lo / step)));
            const auto last = std::min(n - 1, static_cast<std::size_t>(std::floor(hi / step)));
            for (std::size_t k = first; k <= last; ++k) {
                const double level = prof.delta[k];
                if (level <= lo || level > hi) continue;
                prof.s[k] += cell_contour(xs, ys, fv, ov, level);
            }
        }
    }
    prof.s[0] = prof.boundary_measure;
    // The top level touches the field maximum; use the limit from below.
    prof.s[n - 1] = std::max(0.0, 2.0 * prof.s[n - 2] - prof.s[n - 3]);

    prof.v = numerics::cumulative_trapezoid(prof.delta, prof.s);
    // Richardson estimate of the trapezoid error plus an O(h) contouring term.
    double coarse = 0.0;
    for (std::size_t k = 2; k < n; k += 2) coarse += (prof.delta[k] - prof.delta[k - 2]) * (prof.s[k] + prof.s[k - 2]) * 0.5;
    const std::size_t even_end = (n - 1) % 2 == 0 ? n - 1 : n - 2;
    std::size_t vertex_count = poly.outer.size();
    for (const auto& hole : poly.holes) vertex_count += hole.size();
    prof.quadrature_error = std::abs(prof.v[even_end] - coarse) / 3.0 +
                            dmax * 4.0 * g.h * static_cast<double>(vertex_count) + step * prof.boundary_measure * 0.5;

    prof.S.resize(n);
    prof.V.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        prof.S[k] = reference_measure(side, geo, prof.reference_radius, prof.delta[k]);
        prof.V[k] = reference_volume(side, geo, prof.reference_radius, prof.delta[k]);
    }
    return prof;
}

} // namespace rfk::geometry
