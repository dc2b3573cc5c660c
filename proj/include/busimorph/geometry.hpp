#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "busimorph/errors.hpp"

namespace busimorph {

// Image coordinates throughout: x grows right, y grows down. Polygon
// orientation is normalized so the signed shoelace sum is non-negative;
// in this frame a positively oriented convex corner has cross(u, v) > 0.

struct Vec2 {
  double x = 0;
  double y = 0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

inline double polygon_signed_area(std::span<const Vec2> pts) {
  if (pts.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % pts.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return s / 2.0;
}

/// |shoelace sum| / 2. Fewer than 3 points is degenerate and yields 0.
inline double polygon_area(std::span<const Vec2> pts) {
  return std::abs(polygon_signed_area(pts));
}

/// Sum of edge lengths including the closing edge. Requires >= 2 points.
inline double polygon_perimeter(std::span<const Vec2> pts) {
  if (pts.size() < 2) throw DegenerateContour("polygon_perimeter: need >= 2 points");
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += distance(pts[i], pts[(i + 1) % pts.size()]);
  }
  return s;
}

/// Monotone-chain convex hull. Output is positively oriented with collinear
/// interior points removed; a single input point yields a one-point hull.
inline std::vector<Vec2> convex_hull(std::span<const Vec2> pts) {
  std::vector<Vec2> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  const std::size_t n = p.size();
  if (n <= 2) return p;

  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
    while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  if (polygon_signed_area(h) < 0) std::reverse(h.begin(), h.end());
  return h;
}

/// Axis-aligned bounding rectangle in pixel convention: width/height count
/// pixel rows and columns, so a horizontal segment has height 1.
struct BoundingRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

inline BoundingRect bounding_rect(std::span<const Vec2> pts) {
  if (pts.empty()) throw DegenerateContour("bounding_rect: empty point set");
  double minx = pts[0].x, maxx = pts[0].x, miny = pts[0].y, maxy = pts[0].y;
  for (const Vec2& p : pts) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  BoundingRect r;
  r.x = static_cast<int>(std::floor(minx));
  r.y = static_cast<int>(std::floor(miny));
  r.width = static_cast<int>(std::floor(maxx)) - r.x + 1;
  r.height = static_cast<int>(std::floor(maxy)) - r.y + 1;
  return r;
}

/// Tight polygonal extents (max - min), the like-for-like box for area
/// ratios against shoelace areas.
struct PolyExtents {
  double width = 0;
  double height = 0;
};

inline PolyExtents polygon_extents(std::span<const Vec2> pts) {
  if (pts.empty()) throw DegenerateContour("polygon_extents: empty point set");
  double minx = pts[0].x, maxx = pts[0].x, miny = pts[0].y, maxy = pts[0].y;
  for (const Vec2& p : pts) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  return {maxx - minx, maxy - miny};
}

/// Minimum-area enclosing rectangle. Width/height are side lengths of the
/// rotated box (sub-pixel), angle in degrees in [0, 90).
struct MinAreaRect {
  Vec2 center;
  double width = 0;
  double height = 0;
  double angle_deg = 0;

  double area() const { return width * height; }
};

// The minimum-area rectangle has a side collinear with a hull edge, so it
// suffices to test each hull edge direction.
inline MinAreaRect min_area_rect(std::span<const Vec2> pts) {
  if (pts.empty()) throw DegenerateContour("min_area_rect: empty point set");
  std::vector<Vec2> hull = convex_hull(pts);
  MinAreaRect best;
  if (hull.size() == 1) {
    best.center = hull[0];
    return best;
  }

  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
    double len = norm(e);
    if (len == 0) continue;
    Vec2 u{e.x / len, e.y / len};
    Vec2 v{-u.y, u.x};
    double lo_u = 0, hi_u = 0, lo_v = 0, hi_v = 0;
    bool first = true;
    for (const Vec2& p : hull) {
      Vec2 d = p - hull[i];
      double pu = dot(d, u), pv = dot(d, v);
      if (first) {
        lo_u = hi_u = pu;
        lo_v = hi_v = pv;
        first = false;
      } else {
        lo_u = std::min(lo_u, pu);
        hi_u = std::max(hi_u, pu);
        lo_v = std::min(lo_v, pv);
        hi_v = std::max(hi_v, pv);
      }
    }
    double w = hi_u - lo_u, h = hi_v - lo_v;
    double area = w * h;
    if (area < best_area - 1e-12) {
      best_area = area;
      double cu = (lo_u + hi_u) / 2, cv = (lo_v + hi_v) / 2;
      best.center = hull[i] + u * cu + v * cv;
      double ang = std::atan2(u.y, u.x) * 180.0 / M_PI;
      // Normalize to [0, 90) and keep width as the side along the reported angle.
      while (ang < 0) ang += 180.0;
      if (ang >= 90.0) {
        ang -= 90.0;
        std::swap(w, h);
      }
      best.width = w;
      best.height = h;
      best.angle_deg = ang;
    }
  }
  if (!std::isfinite(best_area)) {  // all hull points coincide
    best.center = hull[0];
    best.width = best.height = 0;
  }
  return best;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

inline void dp_simplify(const std::vector<Vec2>& pts, std::size_t lo, std::size_t hi,
                        double eps, std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1;
  std::size_t worst_i = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > worst) {
      worst = d;
      worst_i = i;
    }
  }
  if (worst > eps) {
    keep[worst_i] = true;
    dp_simplify(pts, lo, worst_i, eps, keep);
    dp_simplify(pts, worst_i, hi, eps, keep);
  }
}

}  // namespace detail

/// Douglas-Peucker simplification of a closed polygon. The ring is split at
/// the first point and the point farthest from it, each arc simplified
/// independently. Vertex order (and therefore orientation) is preserved.
inline std::vector<Vec2> simplify_polygon(std::span<const Vec2> ring, double eps) {
  const std::size_t n = ring.size();
  if (n <= 3 || eps <= 0) return {ring.begin(), ring.end()};

  std::size_t far_i = 1;
  double far_d = -1;
  for (std::size_t i = 1; i < n; ++i) {
    double d = distance(ring[i], ring[0]);
    if (d > far_d) {
      far_d = d;
      far_i = i;
    }
  }

  // Unroll the ring to a linear array [0 .. n] with the closing vertex
  // repeated, then simplify [0, far_i] and [far_i, n].
  std::vector<Vec2> pts(ring.begin(), ring.end());
  pts.push_back(ring[0]);
  std::vector<bool> keep(pts.size(), false);
  keep[0] = keep[far_i] = true;
  detail::dp_simplify(pts, 0, far_i, eps, keep);
  detail::dp_simplify(pts, far_i, n, eps, keep);

  std::vector<Vec2> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  if (out.size() < 3) return {ring.begin(), ring.end()};
  return out;
}

/// Largest pairwise distance of a point set (diameter), O(h^2) on the hull.
inline double max_pair_distance(std::span<const Vec2> pts) {
  std::vector<Vec2> hull = convex_hull(pts);
  double best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      best = std::max(best, distance(hull[i], hull[j]));
    }
  }
  return best;
}

}  // namespace busimorph
