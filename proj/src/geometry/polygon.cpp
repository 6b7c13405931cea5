#include "rfk/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "rfk/common.hpp"

namespace rfk::geometry::polygon {

namespace {

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double point_segment_distance(double px, double py, const Point2& a, const Point2& b) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - a[0]) * dx + (py - a[1]) * dy) / len2, 0.0, 1.0);
    const double qx = a[0] + t * dx - px;
    const double qy = a[1] + t * dy - py;
    return std::sqrt(qx * qx + qy * qy);
}

int orientation(const Point2& a, const Point2& b, const Point2& c) {
    const double v = cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
    const double scale = std::max({std::abs(b[0] - a[0]), std::abs(b[1] - a[1]), std::abs(c[0] - a[0]),
                                   std::abs(c[1] - a[1]), 1e-300});
    if (std::abs(v) <= 1e-14 * scale * scale) return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& c) {
    return std::min(a[0], b[0]) <= c[0] && c[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= c[1] &&
           c[1] <= std::max(a[1], b[1]);
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

} // namespace

double signed_area(const Loop& loop) {
    double a = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = loop[i];
        const auto& q = loop[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

double perimeter(const Loop& loop) {
    double len = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = loop[i];
        const auto& q = loop[(i + 1) % n];
        len += std::hypot(q[0] - p[0], q[1] - p[1]);
    }
    return len;
}

bool contains(const Loop& loop, double x, double y) {
    bool inside = false;
    const std::size_t n = loop.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = loop[i];
        const auto& b = loop[j];
        if ((a[1] > y) != (b[1] > y)) {
            const double xc = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if (x < xc) inside = !inside;
        }
    }
    return inside;
}

double distance(const Loop& loop, double x, double y) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) d = std::min(d, point_segment_distance(x, y, loop[i], loop[(i + 1) % n]));
    return d;
}

double loop_gap(const Loop& a, const Loop& b) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : a) d = std::min(d, distance(b, p[0], p[1]));
    for (const auto& p : b) d = std::min(d, distance(a, p[0], p[1]));
    return d;
}

bool self_intersects(const Loop& loop) {
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n])) return true;
        }
    }
    return false;
}

bool loops_intersect(const Loop& a, const Loop& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
    return false;
}

void validate(const PolygonWithHoles& poly) {
    auto check_loop = [](const Loop& loop, const char* what) {
        if (loop.size() < 3) throw InvalidInput(std::string(what) + " loop needs at least 3 vertices");
        for (const auto& p : loop)
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
                throw InvalidInput(std::string(what) + " loop has a non-finite vertex");
        if (std::abs(signed_area(loop)) <= 0.0) throw InvalidInput(std::string(what) + " loop has zero area");
        if (self_intersects(loop)) throw InvalidInput(std::string(what) + " loop self-intersects");
    };
    check_loop(poly.outer, "outer");
    for (std::size_t h = 0; h < poly.holes.size(); ++h) {
        const Loop& hole = poly.holes[h];
        check_loop(hole, "hole");
        if (loops_intersect(poly.outer, hole)) throw InvalidInput("hole crosses the outer loop");
        for (const auto& p : hole)
            if (!contains(poly.outer, p[0], p[1])) throw InvalidInput("hole is not inside the outer loop");
        for (std::size_t g = 0; g < h; ++g) {
            const Loop& other = poly.holes[g];
            if (loops_intersect(other, hole)) throw InvalidInput("holes intersect");
            if (contains(other, hole[0][0], hole[0][1]) || contains(hole, other[0][0], other[0][1]))
                throw InvalidInput("holes are nested");
        }
    }
}

void SegmentArrays::append(const Loop& loop) {
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = loop[i];
        const auto& b = loop[(i + 1) % n];
        const double ddx = b[0] - a[0];
        const double ddy = b[1] - a[1];
        const double len2 = ddx * ddx + ddy * ddy;
        ax.push_back(a[0]);
        ay.push_back(a[1]);
        dx.push_back(ddx);
        dy.push_back(ddy);
        inv_len2.push_back(len2 > 0.0 ? 1.0 / len2 : 0.0);
    }
}

PolygonWithHoles read(std::istream& in) {
    long loops = 0;
    if (!(in >> loops) || loops < 1) throw InvalidInput("polygon file: bad loop count");
    PolygonWithHoles poly;
    for (long l = 0; l < loops; ++l) {
        long count = 0;
        if (!(in >> count) || count < 3) throw InvalidInput("polygon file: bad vertex count");
        Loop loop(static_cast<std::size_t>(count));
        for (auto& p : loop)
            if (!(in >> p[0] >> p[1])) throw InvalidInput("polygon file: truncated vertex list");
        if (l == 0)
            poly.outer = std::move(loop);
        else
            poly.holes.push_back(std::move(loop));
    }
    return poly;
}

PolygonWithHoles read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open polygon file " + path);
    return read(in);
}

void write(std::ostream& out, const PolygonWithHoles& poly) {
    out.precision(17);
    out << 1 + poly.holes.size() << '\n';
    auto put = [&](const Loop& loop) {
        out << loop.size() << '\n';
        for (const auto& p : loop) out << p[0] << ' ' << p[1] << '\n';
    };
    put(poly.outer);
    for (const auto& h : poly.holes) put(h);
}

} // namespace rfk::geometry::polygon
