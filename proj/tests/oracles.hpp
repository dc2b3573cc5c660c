// Independent reference implementations used only by the test suite.
// Each one deliberately takes a different algorithmic route than the
// library so that agreement is evidence, not tautology.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "busimorph/geometry.hpp"
#include "busimorph/image.hpp"

namespace oracles {

using busimorph::MaskImage;
using busimorph::Vec2;

// Pixel-count area: no geometry involved.
inline long long pixel_area(const MaskImage& m) {
  long long n = 0;
  for (std::uint8_t v : m.pixels) n += v;
  return n;
}

// Chain-code perimeter: count orthogonal and diagonal unit steps separately,
// then combine once. Only valid for 8-connected lattice contours.
inline double step_sum_perimeter(const std::vector<Vec2>& pts) {
  long long ortho = 0, diag = 0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    const long long dx = std::llabs(std::llround(b.x - a.x));
    const long long dy = std::llabs(std::llround(b.y - a.y));
    if (dx + dy == 1) {
      ortho += 1;
    } else if (dx == 1 && dy == 1) {
      diag += 1;
    } else {
      return -1.0;  // not a chain-code contour
    }
  }
  return static_cast<double>(ortho) +
         static_cast<double>(diag) * std::sqrt(2.0);
}

// Gift-wrapping convex hull over lattice points.
inline std::vector<Vec2> jarvis_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;

  auto cross3 = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Vec2> hull;
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x < pts[start].x ||
        (pts[i].x == pts[start].x && pts[i].y < pts[start].y)) {
      start = i;
    }
  }
  std::size_t p = start;
  do {
    hull.push_back(pts[p]);
    std::size_t q = (p + 1) % pts.size();
    for (std::size_t r = 0; r < pts.size(); ++r) {
      const double c = cross3(pts[p], pts[q], pts[r]);
      if (c < 0) {
        q = r;
      } else if (c == 0) {
        const double dq = std::hypot(pts[q].x - pts[p].x, pts[q].y - pts[p].y);
        const double dr = std::hypot(pts[r].x - pts[p].x, pts[r].y - pts[p].y);
        if (dr > dq) q = r;
      }
    }
    p = q;
  } while (p != start && hull.size() <= pts.size());
  return hull;
}

inline std::set<std::pair<long long, long long>> vertex_set(
    const std::vector<Vec2>& pts) {
  std::set<std::pair<long long, long long>> s;
  for (const Vec2& p : pts) s.insert({std::llround(p.x), std::llround(p.y)});
  return s;
}

// Turn-sign corner classification for polygons whose vertices are true
// corners. Returns {convex, concave} counts using the library's screen
// convention (y grows downward, positive signed area).
inline std::pair<int, int> corner_scan(std::vector<Vec2> poly) {
  double signed2 = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    signed2 += a.x * b.y - b.x * a.y;
  }
  if (signed2 < 0) std::reverse(poly.begin(), poly.end());
  int convex = 0, concave = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = poly[(i + n - 1) % n];
    const Vec2& cur = poly[i];
    const Vec2& next = poly[(i + 1) % n];
    const double c = (cur.x - prev.x) * (next.y - cur.y) -
                     (cur.y - prev.y) * (next.x - cur.x);
    if (c > 0) {
      convex += 1;
    } else if (c < 0) {
      concave += 1;
    }
  }
  return {convex, concave};
}

// Table-driven two-pass thinning. Neighborhood bits are packed
// N,NE,E,SE,S,SW,W,NW (bit 0 = N).
inline const std::array<std::array<bool, 256>, 2>& thinning_tables() {
  static const std::array<std::array<bool, 256>, 2> tables = [] {
    std::array<std::array<bool, 256>, 2> t{};
    for (int mask = 0; mask < 256; ++mask) {
      std::array<int, 8> p{};
      for (int i = 0; i < 8; ++i) p[i] = (mask >> i) & 1;
      int b = 0;
      for (int v : p) b += v;
      int a = 0;
      for (int i = 0; i < 8; ++i) {
        if (p[i] == 0 && p[(i + 1) % 8] == 1) a += 1;
      }
      const int N = p[0], E = p[2], S = p[4], W = p[6];
      const bool common = b >= 2 && b <= 6 && a == 1;
      t[0][mask] = common && N * E * S == 0 && E * S * W == 0;
      t[1][mask] = common && N * E * W == 0 && N * S * W == 0;
    }
    return t;
  }();
  return tables;
}

inline MaskImage lut_thin(MaskImage m) {
  const auto& tables = thinning_tables();
  static const int dx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  static const int dy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  bool changed = true;
  while (changed) {
    changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      std::vector<std::pair<int, int>> kill;
      for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
          if (!m.at(x, y)) continue;
          int mask = 0;
          for (int i = 0; i < 8; ++i) {
            if (m.at_or_zero(x + dx[i], y + dy[i])) mask |= 1 << i;
          }
          if (tables[phase][mask]) kill.emplace_back(x, y);
        }
      }
      for (const auto& [x, y] : kill) m.set(x, y, 0);
      if (!kill.empty()) changed = true;
    }
  }
  return m;
}

// Composite Simpson quadrature of the exact elliptic arc length.
inline double simpson_ellipse_perimeter(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  const double e2 = 1.0 - (small * small) / (big * big);
  const int n = 4096;
  const double h = (std::acos(-1.0) / 2.0) / n;
  auto f = [&](double t) {
    const double s = std::sin(t);
    return std::sqrt(1.0 - e2 * s * s);
  };
  double sum = f(0) + f(n * h);
  for (int i = 1; i < n; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return 4.0 * big * sum * h / 3.0;
}

// Brute-force minimum-area enclosing rectangle via a fine rotation sweep.
inline double sweep_min_rect_area(const std::vector<Vec2>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (double deg = 0.0; deg < 90.0; deg += 0.05) {
    const double rad = deg * std::acos(-1.0) / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    for (const Vec2& p : pts) {
      const double x = p.x * c - p.y * s;
      const double y = p.x * s + p.y * c;
      minx = std::min(minx, x);
      maxx = std::max(maxx, x);
      miny = std::min(miny, y);
      maxy = std::max(maxy, y);
    }
    best = std::min(best, (maxx - minx) * (maxy - miny));
  }
  return best;
}

// Direct TP/TN/FP/FN counting for one class over raw label pairs.
struct Counts {
  long long tp = 0, tn = 0, fp = 0, fn = 0;
};
inline Counts count_one_vs_rest(const std::vector<int>& actual,
                                const std::vector<int>& predicted, int cls) {
  Counts c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool a = actual[i] == cls;
    const bool p = predicted[i] == cls;
    if (a && p) c.tp++;
    else if (!a && !p) c.tn++;
    else if (!a && p) c.fp++;
    else c.fn++;
  }
  return c;
}

}  // namespace oracles
