#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "busimorph/errors.hpp"
#include "busimorph/geometry.hpp"
#include "busimorph/image.hpp"
#include "busimorph/imgproc.hpp"

namespace busimorph {

/// Closed boundary polygon of a region. Points are pixel centers; consecutive
/// points (including last->first) are 8-neighbors, and the orientation is
/// normalized so the signed shoelace sum is non-negative.
struct Contour {
  std::vector<Vec2> points;

  std::size_t size() const { return points.size(); }
  bool degenerate() const { return points.size() < 3; }
};

namespace detail {

// Ring of 8 directions in clockwise screen order (y grows down).
inline constexpr std::array<std::pair<int, int>, 8> kRing = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

inline int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i].first == dx && kRing[i].second == dy) return i;
  }
  throw InternalError("ring_index: not a king move");
}

}  // namespace detail

/// Moore-neighbor border following over the largest foreground component.
/// Starts at the first foreground pixel in row-major order and walks the
/// outer boundary; tracing stops when the (pixel, backtrack) state repeats,
/// which subsumes the usual revisit-the-start stopping rule and also
/// terminates on single-pixel-wide spurs.
inline Contour trace_contour(const MaskImage& mask) {
  const MaskImage comp = largest_component(mask, Connectivity::Eight);
  int sx = -1, sy = -1;
  for (int y = 0; y < comp.height && sx < 0; ++y) {
    for (int x = 0; x < comp.width; ++x) {
      if (comp.at(x, y)) {
        sx = x;
        sy = y;
        break;
      }
    }
  }
  if (sx < 0) throw EmptyMask("trace_contour: no foreground pixels");

  Contour out;
  // Entry states already seen, one bit per backtrack direction.
  std::vector<std::uint8_t> seen(comp.pixels.size(), 0);

  int cx = sx, cy = sy;
  int back = 4;  // west: everything before the start pixel in row-major order is background
  const std::size_t cap = comp.pixels.size() * 8 + 16;
  for (std::size_t iter = 0; iter < cap; ++iter) {
    std::uint8_t& bits = seen[static_cast<std::size_t>(cy) * comp.width + cx];
    if (bits & (1u << back)) break;
    bits |= (1u << back);
    out.points.push_back({static_cast<double>(cx), static_cast<double>(cy)});

    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int d = (back + i) % 8;
      const int nx = cx + detail::kRing[d].first;
      const int ny = cy + detail::kRing[d].second;
      if (comp.at_or_zero(nx, ny)) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel

    // New backtrack is the background cell examined just before the hit.
    const int prev = (found + 7) % 8;
    const int bx = cx + detail::kRing[prev].first;
    const int by = cy + detail::kRing[prev].second;
    cx += detail::kRing[found].first;
    cy += detail::kRing[found].second;
    back = detail::ring_index(bx - cx, by - cy);
  }

  // Trim a trailing revisit of the start point; closure is implicit.
  while (out.points.size() > 1 && out.points.back() == out.points.front()) {
    out.points.pop_back();
  }
  if (polygon_signed_area(out.points) < 0) {
    std::reverse(out.points.begin() + 1, out.points.end());
  }
  return out;
}

}  // namespace busimorph
