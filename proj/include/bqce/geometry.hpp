#pragma once

#include <span>
#include <vector>

#include "bqce/types.hpp"

namespace bqce {

using Polygon = std::vector<Vec2>;

/// Signed area (positive for counterclockwise vertex order).
double polygon_area(std::span<const Vec2> poly);

/// Intersection of two convex counterclockwise polygons by successive
/// half-plane clipping of `subject` against the edges of `clip`. Results
/// with area below 1e-14 are returned empty.
Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

/// Barycentric coordinates of x with respect to triangle (a, b, c).
Eigen::Vector3d barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x);

}  // namespace bqce
