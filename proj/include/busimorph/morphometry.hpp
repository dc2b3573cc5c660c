#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "busimorph/contour.hpp"
#include "busimorph/curvature.hpp"
#include "busimorph/errors.hpp"
#include "busimorph/geometry.hpp"
#include "busimorph/image.hpp"
#include "busimorph/imgproc.hpp"
#include "busimorph/moments.hpp"
#include "busimorph/skeleton.hpp"

namespace busimorph {

struct MorphometryParams {
  int k = 5;
  double smooth_threshold_deg = 40.0;
  // Measurement-polygon tolerance: the traced pixel chain is simplified with
  // Douglas-Peucker before metric features are computed, removing the
  // staircase bias that otherwise overestimates smooth perimeters by ~5%.
  // The value is in pixels for a region whose sqrt(pixel count) is 100; the
  // effective tolerance follows the region's linear size, so a mask and its
  // integer upscale produce congruent measurement polygons. Regions need
  // roughly 2000 foreground pixels before the staircase is fully smoothed
  // at this default. Set to 0 to measure on the raw chain.
  double simplify_eps = 1.5;
  // Use the hull diameter instead of the fitted ellipse's major axis as the
  // max-diameter in the roundness denominator.
  bool hull_diameter_roundness = false;
  Connectivity connectivity = Connectivity::Eight;
};

struct FeatureVector {
  double perimeter = 0;
  double height = 0;  // bounding extent along y
  double width = 0;   // bounding extent along x
  double area = 0;
  double cspi = 0;  // always an even integer
  double li = 0;
  double ens = 0;  // skeleton pixel count
  double aspect_ratio = 0;
  double form_factor = 0;
  double roundness = 0;
  double solidity = 0;
  double major_axis = 0;
  double minor_axis = 0;
  double enc = 0;
  double ls_ratio = 0;
  double convexity = 0;
  double extent = 0;
  double tca_ratio = 0;
  bool degenerate = false;

  static constexpr int kCount = 18;

  static const std::array<const char*, kCount>& names() {
    static const std::array<const char*, kCount> kNames = {
        "perimeter", "height",     "width",      "area",       "cspi",
        "li",        "ens",        "aspect_ratio", "form_factor", "roundness",
        "solidity",  "major_axis", "minor_axis", "enc",        "ls_ratio",
        "convexity", "extent",     "tca_ratio"};
    return kNames;
  }

  std::array<double, kCount> values() const {
    return {perimeter, height,     width,      area,       cspi,
            li,        ens,        aspect_ratio, form_factor, roundness,
            solidity,  major_axis, minor_axis, enc,        ls_ratio,
            convexity, extent,     tca_ratio};
  }

  void set_values(const std::array<double, kCount>& v) {
    perimeter = v[0];
    height = v[1];
    width = v[2];
    area = v[3];
    cspi = v[4];
    li = v[5];
    ens = v[6];
    aspect_ratio = v[7];
    form_factor = v[8];
    roundness = v[9];
    solidity = v[10];
    major_axis = v[11];
    minor_axis = v[12];
    enc = v[13];
    ls_ratio = v[14];
    convexity = v[15];
    extent = v[16];
    tca_ratio = v[17];
  }
};

namespace detail {

// Canonical cyclic start for the measurement polygon: the vertex farthest
// from the vertex centroid. Both the distances and the tie-breaking sequence
// comparison are preserved bit for bit by 90-degree lattice rotations, which
// keeps metric features rotation-invariant despite the scan-order-dependent
// trace start.
inline std::size_t canonical_start(const std::vector<Vec2>& pts) {
  const std::size_t n = pts.size();
  double sx = 0, sy = 0;
  for (const Vec2& p : pts) {
    sx += p.x;
    sy += p.y;
  }
  const double cx = sx / static_cast<double>(n);
  const double cy = sy / static_cast<double>(n);

  std::vector<double> d2(n);
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts[i].x - cx;
    const double dy = pts[i].y - cy;
    d2[i] = dx * dx + dy * dy;
    best = std::max(best, d2[i]);
  }
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < n; ++i) {
    if (d2[i] == best) cand.push_back(i);
  }
  if (cand.size() == 1) return cand[0];

  // Tied candidates: keep the one whose forward distance sequence is
  // lexicographically greatest; a full tie means the shape is symmetric and
  // any choice yields congruent measurements.
  std::size_t keep = cand[0];
  for (std::size_t c = 1; c < cand.size(); ++c) {
    const std::size_t a = keep, b = cand[c];
    for (std::size_t off = 1; off < n; ++off) {
      const double da = d2[(a + off) % n];
      const double db = d2[(b + off) % n];
      if (da != db) {
        if (db > da) keep = b;
        break;
      }
    }
  }
  return keep;
}

}  // namespace detail

/// Simplified closed polygon used for the metric features, rotated to a
/// canonical start vertex so measurements do not depend on where the tracer
/// happened to begin.
inline std::vector<Vec2> measurement_polygon(const std::vector<Vec2>& raw,
                                             double eps) {
  if (raw.size() <= 3 || eps <= 0) return raw;
  const std::size_t s = detail::canonical_start(raw);
  std::vector<Vec2> rotated;
  rotated.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    rotated.push_back(raw[(s + i) % raw.size()]);
  }
  return simplify_polygon(rotated, eps);
}

/// Everything produced while extracting one sample, for diagnostics and
/// overlay rendering.
struct ExtractionDetail {
  MaskImage component{1, 1};
  Contour contour;
  std::vector<Vec2> measure_poly;
  std::vector<CurvaturePoint> curvature;
  std::vector<CurvaturePoint> salient;
  std::vector<LobeInfo> lobes;
  EllipseFit ellipse;
  bool ellipse_ok = false;
  FeatureVector features;
};

inline ExtractionDetail extract_features_detailed(
    const MaskImage& mask, const MorphometryParams& params = {}) {
  ExtractionDetail d;
  d.features.degenerate = true;

  d.component = largest_component(mask, params.connectivity);
  const std::int64_t px = d.component.foreground_count();
  if (px == 0) return d;

  d.contour = trace_contour(d.component);
  const std::vector<Vec2>& raw = d.contour.points;
  if (raw.size() < 3) return d;

  // sqrt of the pixel count is exact under lattice rotation and block
  // upscaling, which keeps the simplification scale-covariant.
  const double eps =
      params.simplify_eps * std::sqrt(static_cast<double>(px)) / 100.0;
  d.measure_poly = measurement_polygon(raw, eps);
  const double area = polygon_area(d.measure_poly);
  if (area <= 0) return d;

  const double perim = polygon_perimeter(d.measure_poly);
  const std::vector<Vec2> hull = convex_hull(d.measure_poly);
  const double hull_area = polygon_area(hull);
  const double hull_perim = polygon_perimeter(hull);
  // Bounding box of the raw chain, not the simplified polygon: simplification
  // may shave the extreme vertex on one side and not the other, which would
  // make extent and aspect ratio jitter with the raster phase.
  const PolyExtents ext = polygon_extents(raw);
  if (hull_area <= 0 || ext.width <= 0 || ext.height <= 0) return d;

  CurvatureParams cp;
  const std::size_t n = raw.size();
  cp.k = std::max(1, std::min(params.k, static_cast<int>((n - 1) / 2)));
  cp.smooth_threshold_deg = params.smooth_threshold_deg;
  d.curvature = curvature_points(raw, cp);
  d.salient = suppress_points(d.curvature);
  d.lobes = lobe_regions(raw, d.salient);

  try {
    d.ellipse = equivalent_ellipse(d.component);
    d.ellipse_ok = true;
  } catch (const DegenerateRegion&) {
    d.ellipse_ok = false;
  }

  FeatureVector& f = d.features;
  f.degenerate = false;
  f.perimeter = perim;
  f.height = ext.height;
  f.width = ext.width;
  f.area = area;
  f.cspi = concavity_index(d.salient);
  f.li = lobulation_index(raw, d.salient);
  f.ens = skeleton_size(d.component);
  f.aspect_ratio = ext.height / ext.width;
  const double pi = 3.14159265358979323846;
  f.form_factor = 4.0 * pi * area / (perim * perim);
  f.solidity = area / hull_area;
  f.tca_ratio = area / hull_area;
  f.convexity = hull_perim / perim;
  f.extent = area / (ext.width * ext.height);
  if (d.ellipse_ok) {
    f.major_axis = 2.0 * d.ellipse.a;
    f.minor_axis = 2.0 * d.ellipse.b;
    f.ls_ratio = d.ellipse.a / d.ellipse.b;
    f.enc = d.ellipse.perimeter / perim;
    const double maxd = params.hull_diameter_roundness
                            ? max_pair_distance(d.measure_poly)
                            : f.major_axis;
    if (maxd > 0) f.roundness = 4.0 * area / (pi * maxd * maxd);
  }
  return d;
}

inline FeatureVector extract_features(const MaskImage& mask,
                                      const MorphometryParams& params = {}) {
  return extract_features_detailed(mask, params).features;
}

// ---------------------------------------------------------------------------
// Feature CSV, fixed schema shared by the extractor, trainer and evaluator.

struct FeatureRow {
  std::string id;
  std::string class_name;
  FeatureVector features;
};

inline std::string feature_csv_header() {
  std::string h = "id,class";
  for (const char* name : FeatureVector::names()) {
    h += ',';
    h += name;
  }
  h += ",degenerate";
  return h;
}

namespace detail {

inline std::string format_double(double v) {
  // Shortest representation that round-trips; integers stay integral.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const char* what) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw DataError(std::string("bad numeric field in ") + what + ": '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline std::string feature_row_to_csv(const FeatureRow& row) {
  if (row.id.find_first_of(",\n\r") != std::string::npos ||
      row.class_name.find_first_of(",\n\r") != std::string::npos) {
    throw DataError("sample id/class may not contain commas or newlines: " + row.id);
  }
  std::string line = row.id + ',' + row.class_name;
  for (double v : row.features.values()) {
    line += ',';
    line += detail::format_double(v);
  }
  line += row.features.degenerate ? ",true" : ",false";
  return line;
}

inline void write_features_csv(const std::string& path,
                               const std::vector<FeatureRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << feature_csv_header() << '\n';
  for (const FeatureRow& row : rows) out << feature_row_to_csv(row) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::vector<FeatureRow> read_features_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyInput("empty feature file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != feature_csv_header()) {
    throw SchemaMismatch("unexpected feature header in " + path);
  }

  std::vector<FeatureRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != FeatureVector::kCount + 3) {
      throw SchemaMismatch("wrong field count at " + path + ":" +
                           std::to_string(lineno));
    }
    FeatureRow row;
    row.id = f[0];
    row.class_name = f[1];
    std::array<double, FeatureVector::kCount> vals{};
    for (int i = 0; i < FeatureVector::kCount; ++i) {
      vals[i] = detail::parse_double(f[2 + i], "feature csv");
    }
    row.features.set_values(vals);
    const std::string& flag = f[FeatureVector::kCount + 2];
    if (flag == "true") {
      row.features.degenerate = true;
    } else if (flag == "false") {
      row.features.degenerate = false;
    } else {
      throw DataError("bad degenerate flag at " + path + ":" +
                      std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput("no data rows in " + path);
  return rows;
}

}  // namespace busimorph
