#include "bqce/geometry.hpp"

#include <cmath>

namespace bqce {

double polygon_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * twice;
}

Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  Polygon out(subject.begin(), subject.end());
  Polygon next;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2 p = clip[e];
    const Vec2 q = clip[(e + 1) % m];
    const Vec2 edge = q - p;
    // side > 0: strictly left of p->q (inside for ccw clip polygons)
    auto side = [&](const Vec2& x) { return edge.x() * (x.y() - p.y()) - edge.y() * (x.x() - p.x()); };

    next.clear();
    const std::size_t n = out.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2& a = out[k];
      const Vec2& b = out[(k + 1) % n];
      const double sa = side(a);
      const double sb = side(b);
      if (sa >= 0.0) next.push_back(a);
      if ((sa >= 0.0) != (sb >= 0.0)) {
        const double t = sa / (sa - sb);
        next.push_back(a + t * (b - a));
      }
    }
    out.swap(next);
  }
  if (out.size() < 3 || polygon_area(out) < 1e-14) out.clear();
  return out;
}

Eigen::Vector3d barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  const double l1 = ((x.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (x.y() - a.y())) / det;
  const double l2 = ((b.x() - a.x()) * (x.y() - a.y()) - (x.x() - a.x()) * (b.y() - a.y())) / det;
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace bqce
