#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rfk/geometry.hpp"

namespace rfk::geometry::polygon {

/// Shoelace area; positive for counter-clockwise loops.
double signed_area(const Loop& loop);
double perimeter(const Loop& loop);
/// Crossing-number test; points on the boundary may go either way.
bool contains(const Loop& loop, double x, double y);
/// Euclidean distance from (x, y) to the closed polyline.
double distance(const Loop& loop, double x, double y);
/// Smallest distance between two loops (vertex-to-segment in both directions).
double loop_gap(const Loop& a, const Loop& b);
bool self_intersects(const Loop& loop);
bool loops_intersect(const Loop& a, const Loop& b);

/// Throws InvalidInput if loops are degenerate, self-intersecting, crossing,
/// or if a hole is not strictly inside the outer loop or lies in another hole.
void validate(const PolygonWithHoles& poly);

/// Segments of the loop in the structure-of-arrays layout used by the
/// distance kernel.
struct SegmentArrays {
    std::vector<double> ax, ay, dx, dy, inv_len2;
    void append(const Loop& loop);
};

/// Text format: loop count, then per loop a vertex count followed by `x y`
/// lines. The first loop is the outer boundary.
PolygonWithHoles read(std::istream& in);
PolygonWithHoles read_file(const std::string& path);
void write(std::ostream& out, const PolygonWithHoles& poly);

} // namespace rfk::geometry::polygon
