#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "busimorph/errors.hpp"
#include "busimorph/geometry.hpp"

namespace busimorph {

enum class PointKind { Smooth, Convex, Concave };

struct CurvaturePoint {
  std::size_t index = 0;     // position in the contour
  PointKind kind = PointKind::Smooth;
  double deviation_deg = 0;  // 180 deg minus the interior angle of the k-step arms
};

struct CurvatureParams {
  int k = 5;
  double smooth_threshold_deg = 40.0;
};

/// Per-vertex turn angle using arms of k contour steps on each side.
/// Sign convention matches the normalized contour orientation: convex
/// corners have positive cross product in y-down coordinates.
inline std::vector<CurvaturePoint> curvature_points(
    const std::vector<Vec2>& poly, const CurvatureParams& params = {}) {
  const std::size_t n = poly.size();
  const std::size_t k = static_cast<std::size_t>(std::max(params.k, 1));
  if (n <= 2 * k) {
    throw ContourTooShort("curvature_points: need more than 2k contour points");
  }

  std::vector<CurvaturePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = poly[(i + n - k) % n];
    const Vec2& next = poly[(i + k) % n];
    const Vec2 u = poly[i] - prev;
    const Vec2 v = next - poly[i];
    const double cr = cross(u, v);
    const double dt = dot(u, v);
    const double dev = std::atan2(std::abs(cr), dt) * 180.0 / 3.14159265358979323846;

    CurvaturePoint cp;
    cp.index = i;
    cp.deviation_deg = dev;
    if (dev <= params.smooth_threshold_deg) {
      cp.kind = PointKind::Smooth;
    } else {
      cp.kind = cr > 0 ? PointKind::Convex : PointKind::Concave;
    }
    out.push_back(cp);
  }
  return out;
}

/// Non-maximum suppression of salient points. Smooth points are dropped;
/// within each maximal cyclic run of one kind (runs are separated only by
/// points of the opposite kind) the largest-deviation point survives, ties
/// keeping the earliest index. Iterated to a fixpoint, so the survivors
/// alternate Convex/Concave around the contour, or form a single-kind
/// singleton when the other kind never occurs.
inline std::vector<CurvaturePoint> suppress_points(
    const std::vector<CurvaturePoint>& pts) {
  std::vector<CurvaturePoint> cur;
  for (const CurvaturePoint& p : pts) {
    if (p.kind != PointKind::Smooth) cur.push_back(p);
  }

  auto better = [](const CurvaturePoint& a, const CurvaturePoint& b) {
    return a.deviation_deg > b.deviation_deg ||
           (a.deviation_deg == b.deviation_deg && a.index < b.index);
  };

  while (cur.size() > 1) {
    // Rotate so position 0 starts a run, keeping cyclic runs contiguous.
    std::size_t start = 0;
    while (start < cur.size() &&
           cur[(start + cur.size() - 1) % cur.size()].kind == cur[start].kind) {
      ++start;
    }
    if (start == cur.size()) {
      // Single kind all around: keep the single best point.
      CurvaturePoint best = cur[0];
      for (const CurvaturePoint& p : cur) {
        if (better(p, best)) best = p;
      }
      cur.assign(1, best);
      break;
    }

    std::vector<CurvaturePoint> next;
    std::size_t i = 0;
    while (i < cur.size()) {
      const std::size_t at = (start + i) % cur.size();
      CurvaturePoint best = cur[at];
      std::size_t j = i + 1;
      for (; j < cur.size(); ++j) {
        const CurvaturePoint& cand = cur[(start + j) % cur.size()];
        if (cand.kind != best.kind) break;
        if (better(cand, best)) best = cand;
      }
      next.push_back(best);
      i = j;
    }
    if (next.size() == cur.size()) break;
    cur = std::move(next);
  }

  std::sort(cur.begin(), cur.end(),
            [](const CurvaturePoint& a, const CurvaturePoint& b) {
              return a.index < b.index;
            });
  return cur;
}

/// Twice the number of suppressed concave points.
inline int concavity_index(const std::vector<CurvaturePoint>& suppressed) {
  int concave = 0;
  for (const CurvaturePoint& p : suppressed) {
    if (p.kind == PointKind::Concave) ++concave;
  }
  return 2 * concave;
}

/// One lobe: the contour arc between two adjacent concave points plus the
/// closing chord. `flipped` marks chords that cross the arc (negative signed
/// area before taking the absolute value), surfaced in diagnostics.
struct LobeInfo {
  std::size_t from = 0;
  std::size_t to = 0;
  double area = 0;
  bool flipped = false;
};

inline std::vector<LobeInfo> lobe_regions(
    const std::vector<Vec2>& poly,
    const std::vector<CurvaturePoint>& suppressed) {
  const std::size_t n = poly.size();
  std::vector<std::size_t> cuts;
  for (const CurvaturePoint& p : suppressed) {
    if (p.kind == PointKind::Concave) cuts.push_back(p.index);
  }
  std::vector<LobeInfo> lobes;
  if (cuts.size() < 2 || n < 3) return lobes;

  for (std::size_t j = 0; j < cuts.size(); ++j) {
    const std::size_t from = cuts[j];
    const std::size_t to = cuts[(j + 1) % cuts.size()];
    std::vector<Vec2> arc;
    for (std::size_t i = from;; i = (i + 1) % n) {
      arc.push_back(poly[i]);
      if (i == to) break;
    }
    LobeInfo lobe;
    lobe.from = from;
    lobe.to = to;
    const double signed_area = polygon_signed_area(arc);
    lobe.area = std::abs(signed_area);
    lobe.flipped = signed_area < 0;
    lobes.push_back(lobe);
  }
  return lobes;
}

/// Area spread of the lobes cut off by consecutive concave points:
/// (max - min) / mean over the lobe polygon areas. Zero when there are
/// fewer than two concave points.
inline double lobulation_index(const std::vector<Vec2>& poly,
                               const std::vector<CurvaturePoint>& suppressed) {
  const std::vector<LobeInfo> lobes = lobe_regions(poly, suppressed);
  if (lobes.size() < 2) return 0.0;

  double amin = lobes[0].area, amax = lobes[0].area, asum = 0;
  for (const LobeInfo& lobe : lobes) {
    amin = std::min(amin, lobe.area);
    amax = std::max(amax, lobe.area);
    asum += lobe.area;
  }
  const double mean = asum / static_cast<double>(lobes.size());
  if (mean <= 0) return 0.0;
  return (amax - amin) / mean;
}

}  // namespace busimorph
