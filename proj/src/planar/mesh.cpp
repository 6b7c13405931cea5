#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rfk/io.hpp"
#include "rfk/planar.hpp"

namespace rfk::planar {

namespace {

using std::numbers::pi;

double signed_area(const Mesh& m, const std::array<int, 3>& t) {
    const auto& a = m.vertices[static_cast<std::size_t>(t[0])];
    const auto& b = m.vertices[static_cast<std::size_t>(t[1])];
    const auto& c = m.vertices[static_cast<std::size_t>(t[2])];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void add_triangle(Mesh& m, int a, int b, int c) {
    std::array<int, 3> t{a, b, c};
    if (signed_area(m, t) < 0.0) std::swap(t[1], t[2]);
    m.triangles.push_back(t);
}

struct Ring {
    int start;
    int count;
};

Ring add_ring(Mesh& m, double cx, double cy, double radius, int count, VertexTag tag) {
    const Ring ring{static_cast<int>(m.vertices.size()), count};
    for (int i = 0; i < count; ++i) {
        const double t = 2.0 * pi * i / count;
        m.vertices.push_back({cx + radius * std::cos(t), cy + radius * std::sin(t)});
        m.tags.push_back(tag);
    }
    return ring;
}

// Triangulates the band between two rings whose vertices start at angle 0.
void zipper(Mesh& m, const Ring& a, const Ring& b) {
    int i = 0;
    int j = 0;
    while (i < a.count || j < b.count) {
        const int ai = a.start + i % a.count;
        const int bj = b.start + j % b.count;
        // Advance along the ring whose next vertex comes first in angle.
        const bool step_a = j == b.count || (i < a.count && static_cast<long>(i + 1) * b.count <= static_cast<long>(j + 1) * a.count);
        if (step_a) {
            add_triangle(m, ai, a.start + (i + 1) % a.count, bj);
            ++i;
        } else {
            add_triangle(m, ai, b.start + (j + 1) % b.count, bj);
            ++j;
        }
    }
}

Mesh build(const geometry::SphericalShape& sh, double h, double topology_shift) {
    Mesh m;
    if (sh.R0 == 0.0) {
        const int nr = std::max(2, static_cast<int>(std::ceil(sh.R1 / h)));
        m.vertices.push_back({0.0, 0.0});
        m.tags.push_back(VertexTag::Interior);
        Ring prev{0, 1};
        for (int k = 1; k <= nr; ++k) {
            const double rad = sh.R1 * k / nr;
            const int count = std::max(6, static_cast<int>(std::ceil(2.0 * pi * rad / h)));
            const Ring ring = add_ring(m, 0.0, 0.0, rad, count, k == nr ? VertexTag::Outer : VertexTag::Interior);
            if (k == 1) {
                for (int i = 0; i < count; ++i) add_triangle(m, 0, ring.start + i, ring.start + (i + 1) % count);
            } else {
                zipper(m, prev, ring);
            }
            prev = ring;
        }
        return m;
    }
    const double span = sh.R1 - sh.R0 + std::max(sh.e, topology_shift);
    const int nr = std::max(2, static_cast<int>(std::ceil(span / h)));
    Ring prev{};
    for (int k = 0; k <= nr; ++k) {
        const double t = static_cast<double>(k) / nr;
        // Ring k of the blend (1 - t)(c + R0 u) + t R1 u is a circle.
        const double rad = (1.0 - t) * sh.R0 + t * sh.R1;
        const double cx = (1.0 - t) * sh.e;
        const int count = std::max(8, static_cast<int>(std::ceil(2.0 * pi * rad / h)));
        const VertexTag tag = k == 0 ? VertexTag::Inner : (k == nr ? VertexTag::Outer : VertexTag::Interior);
        const Ring ring = add_ring(m, cx, 0.0, rad, count, tag);
        if (k > 0) zipper(m, prev, ring);
        prev = ring;
    }
    return m;
}

std::string tag_name(VertexTag t) {
    switch (t) {
    case VertexTag::Outer: return "outer";
    case VertexTag::Inner: return "inner";
    case VertexTag::Interior: return "interior";
    }
    return "interior";
}

} // namespace

double Mesh::max_edge() const {
    double best = 0.0;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            const auto& a = vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
            const auto& b = vertices[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)])];
            best = std::max(best, std::hypot(a[0] - b[0], a[1] - b[1]));
        }
    return best;
}

double Mesh::min_signed_area() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : triangles) best = std::min(best, signed_area(*this, t));
    return best;
}

double Mesh::area() const {
    double total = 0.0;
    for (const auto& t : triangles) total += signed_area(*this, t);
    return total;
}

Mesh mesh_annulus(const geometry::DomainSpec& domain, double target_h, double topology_shift) {
    if (domain.dim() != 2) throw InvalidInput("mesh_annulus needs a planar domain");
    if (domain.is_polygon()) throw InvalidInput("mesh_annulus handles balls and annuli only");
    if (!(target_h > 0.0)) throw InvalidInput("target_h must be positive");
    if (!(topology_shift >= 0.0)) throw InvalidInput("topology_shift must be >= 0");
    const geometry::SphericalShape sh = domain.spherical();
    const double gap = sh.R0 == 0.0 ? sh.R1 : sh.R1 - sh.R0 - sh.e;
    if (target_h >= gap) throw InvalidInput("target_h too large to separate the boundaries");
    double factor = 0.7;
    for (int attempt = 0; attempt < 24; ++attempt) {
        Mesh m = build(sh, factor * target_h, topology_shift);
        if (m.max_edge() <= target_h) {
            if (!(m.min_signed_area() > 0.0)) throw NumericalFailure("mesh has inverted triangles");
            return m;
        }
        factor *= 0.9;
    }
    throw NumericalFailure("could not meet the target edge length");
}

Mesh mesh_unit_square(std::size_t n) {
    if (n < 1) throw InvalidInput("unit square mesh needs n >= 1");
    Mesh m;
    const int k = static_cast<int>(n);
    for (int j = 0; j <= k; ++j)
        for (int i = 0; i <= k; ++i) {
            m.vertices.push_back({static_cast<double>(i) / k, static_cast<double>(j) / k});
            const bool edge = i == 0 || j == 0 || i == k || j == k;
            m.tags.push_back(edge ? VertexTag::Outer : VertexTag::Interior);
        }
    const auto at = [k](int i, int j) { return j * (k + 1) + i; };
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
            add_triangle(m, at(i, j), at(i + 1, j), at(i + 1, j + 1));
            add_triangle(m, at(i, j), at(i + 1, j + 1), at(i, j + 1));
        }
    return m;
}

std::string mesh_to_text(const Mesh& mesh) {
    std::ostringstream out;
    out << mesh.vertices.size() << '\n';
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        out << io::fmt(mesh.vertices[i][0]) << ' ' << io::fmt(mesh.vertices[i][1]) << ' ' << tag_name(mesh.tags[i])
            << '\n';
    out << mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    return out.str();
}

Mesh mesh_from_text(const std::string& text) {
    std::istringstream in(text);
    Mesh m;
    std::size_t nv = 0;
    if (!(in >> nv)) throw InvalidInput("mesh text: missing vertex count");
    for (std::size_t i = 0; i < nv; ++i) {
        double x = 0.0;
        double y = 0.0;
        std::string tag;
        if (!(in >> x >> y >> tag)) throw InvalidInput("mesh text: truncated vertex list");
        m.vertices.push_back({x, y});
        if (tag == "outer")
            m.tags.push_back(VertexTag::Outer);
        else if (tag == "inner")
            m.tags.push_back(VertexTag::Inner);
        else if (tag == "interior")
            m.tags.push_back(VertexTag::Interior);
        else
            throw InvalidInput("mesh text: unknown tag '" + tag + "'");
    }
    std::size_t nt = 0;
    if (!(in >> nt)) throw InvalidInput("mesh text: missing triangle count");
    for (std::size_t i = 0; i < nt; ++i) {
        std::array<int, 3> t{};
        if (!(in >> t[0] >> t[1] >> t[2])) throw InvalidInput("mesh text: truncated triangle list");
        for (int v : t)
            if (v < 0 || static_cast<std::size_t>(v) >= nv) throw InvalidInput("mesh text: vertex index out of range");
        m.triangles.push_back(t);
    }
    return m;
}

} // namespace rfk::planar
