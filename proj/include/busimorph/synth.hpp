#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "busimorph/dataset.hpp"
#include "busimorph/errors.hpp"
#include "busimorph/image.hpp"
#include "busimorph/png_io.hpp"
#include "busimorph/rng.hpp"

namespace busimorph {

enum class ShapeKind { Disk, Ellipse, Rect, Star, Rosette, Plus };

/// Analytic shape on a pixel canvas. Radial kinds (everything but Rect and
/// Plus) are star-convex in polar form, so lobe counts and depths are ground
/// truth by construction.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Disk;
  int canvas_w = 128;
  int canvas_h = 128;
  double cx = -1;  // < 0 selects the canvas center
  double cy = -1;
  double a = 40;   // radius / semi-major / rect width / plus extent
  double b = 25;   // semi-minor / rect height / plus arm thickness
  int lobes = 5;
  double depth = 0.5;  // lobe depth in [0, 1]
  double rotation_deg = 0;
  std::uint64_t seed = 0;  // jitter stream
  double jitter = 0;       // relative boundary jitter amplitude
};

namespace detail {

struct Jitter {
  std::array<double, 4> amp{};
  std::array<double, 4> phase{};

  double factor(double theta) const {
    double f = 1.0;
    for (int m = 0; m < 4; ++m) {
      f += amp[m] * std::cos((m + 2) * theta + phase[m]);
    }
    return f;
  }
};

inline Jitter make_jitter(const ShapeSpec& spec) {
  Jitter jit;
  if (spec.jitter <= 0) return jit;
  SplitMix64 rng(mix_seed(spec.seed, 0x51A9));
  for (int m = 0; m < 4; ++m) {
    jit.amp[m] = spec.jitter / 4.0 * rng.next_double();
    jit.phase[m] = rng.next_in(0.0, 2.0 * 3.14159265358979323846);
  }
  return jit;
}

inline double radial_profile(const ShapeSpec& spec, double theta) {
  const double pi = 3.14159265358979323846;
  switch (spec.kind) {
    case ShapeKind::Disk:
      return spec.a;
    case ShapeKind::Ellipse: {
      const double c = std::cos(theta), s = std::sin(theta);
      const double den = std::sqrt(spec.b * c * spec.b * c +
                                   spec.a * s * spec.a * s);
      return spec.a * spec.b / den;
    }
    case ShapeKind::Star: {
      // Triangle-wave radius: sharp tips at lobe centers, sharp notches between.
      double u = theta * spec.lobes / (2.0 * pi);
      u -= std::floor(u);
      const double p = 1.0 - 2.0 * std::min(u, 1.0 - u);
      return spec.a * (1.0 - spec.depth + spec.depth * p);
    }
    case ShapeKind::Rosette: {
      double u = theta * spec.lobes;
      const double p = 0.5 * (std::cos(u) + 1.0);
      return spec.a * (1.0 - spec.depth + spec.depth * p);
    }
    default:
      return spec.a;
  }
}

}  // namespace detail

inline MaskImage render(const ShapeSpec& spec) {
  const double pi = 3.14159265358979323846;
  const double cx = spec.cx >= 0 ? spec.cx : spec.canvas_w / 2.0;
  const double cy = spec.cy >= 0 ? spec.cy : spec.canvas_h / 2.0;

  double reach = 0;
  switch (spec.kind) {
    case ShapeKind::Disk:
    case ShapeKind::Star:
    case ShapeKind::Rosette:
      reach = spec.a;
      break;
    case ShapeKind::Ellipse:
      reach = std::max(spec.a, spec.b);
      break;
    case ShapeKind::Rect:
    case ShapeKind::Plus:
      reach = 0.5 * std::hypot(spec.a, spec.b);
      break;
  }
  reach *= 1.0 + spec.jitter;
  if (cx - reach < 2 || cy - reach < 2 || cx + reach > spec.canvas_w - 3 ||
      cy + reach > spec.canvas_h - 3) {
    throw SpecOutOfCanvas("shape does not fit the canvas with a 2px margin");
  }
  if ((spec.kind == ShapeKind::Star || spec.kind == ShapeKind::Rosette) &&
      spec.lobes < 3) {
    throw SpecOutOfCanvas("stars and rosettes need at least 3 lobes");
  }

  const detail::Jitter jit = detail::make_jitter(spec);
  const double rot = spec.rotation_deg * pi / 180.0;
  const double cr = std::cos(rot), sr = std::sin(rot);

  MaskImage mask(spec.canvas_w, spec.canvas_h);
  for (int y = 0; y < spec.canvas_h; ++y) {
    for (int x = 0; x < spec.canvas_w; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      // Inverse-rotate the query point into the shape frame.
      const double sx = dx * cr + dy * sr;
      const double sy = -dx * sr + dy * cr;

      bool inside = false;
      if (spec.kind == ShapeKind::Rect) {
        // Half-open box so axis-aligned integer sizes give exact pixel counts.
        inside = sx >= -spec.a / 2 && sx < spec.a / 2 && sy >= -spec.b / 2 &&
                 sy < spec.b / 2;
      } else if (spec.kind == ShapeKind::Plus) {
        const double hw = spec.a / 2, ht = spec.b / 2;
        inside = (sx >= -hw && sx < hw && sy >= -ht && sy < ht) ||
                 (sx >= -ht && sx < ht && sy >= -hw && sy < hw);
      } else {
        const double r = std::hypot(sx, sy);
        if (r <= 1e-12) {
          inside = true;
        } else {
          const double theta = std::atan2(sy, sx);
          const double rr = detail::radial_profile(spec, theta) *
                            (spec.jitter > 0 ? jit.factor(theta) : 1.0);
          inside = r <= rr;
        }
      }
      if (inside) mask.set(x, y, 1);
    }
  }
  return mask;
}

/// Writes a three-class corpus in the BUSI directory layout: smooth rotated
/// ellipses for benign, deep-lobed stars for malignant, and blank canvases
/// for normal (image plus all-zero mask). Deterministic per (per_class, seed).
inline DatasetIndex synth_corpus(int per_class, std::uint64_t seed,
                                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (per_class < 2) throw DataError("per_class must be >= 2");

  const int canvas = 320;
  std::error_code ec;
  for (const char* cls : {"normal", "benign", "malignant"}) {
    fs::create_directories(fs::path(out_dir) / cls, ec);
    if (ec) throw IoError("cannot create " + (fs::path(out_dir) / cls).string());
  }

  auto write_pair = [&](const std::string& cls, const std::string& id,
                        const MaskImage& mask) {
    const fs::path dir = fs::path(out_dir) / cls;
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
      img.pixels[i] = mask.pixels[i] ? 210 : 24;
    }
    write_gray_png((dir / (id + ".png")).string(), img);
    write_mask_png((dir / (id + "_mask.png")).string(), mask);
  };

  char name[32];
  for (int i = 0; i < per_class; ++i) {
    std::snprintf(name, sizeof(name), "n%04d", i + 1);
    write_pair("normal", name, MaskImage(canvas, canvas));
  }
  for (int i = 0; i < per_class; ++i) {
    SplitMix64 rng(mix_seed(seed, 1, static_cast<std::uint64_t>(i)));
    ShapeSpec spec;
    spec.kind = ShapeKind::Ellipse;
    spec.canvas_w = spec.canvas_h = canvas;
    spec.a = rng.next_in(48, 72);
    spec.b = spec.a / rng.next_in(1.0, 1.8);
    spec.rotation_deg = rng.next_in(0.0, 180.0);
    spec.seed = mix_seed(seed, 2, static_cast<std::uint64_t>(i));
    spec.jitter = 0.03;
    std::snprintf(name, sizeof(name), "b%04d", i + 1);
    write_pair("benign", name, render(spec));
  }
  for (int i = 0; i < per_class; ++i) {
    SplitMix64 rng(mix_seed(seed, 3, static_cast<std::uint64_t>(i)));
    ShapeSpec spec;
    spec.kind = ShapeKind::Star;
    spec.canvas_w = spec.canvas_h = canvas;
    spec.a = rng.next_in(48, 72);
    spec.lobes = 5 + static_cast<int>(rng.next_below(4));
    spec.depth = rng.next_in(0.45, 0.7);
    spec.rotation_deg = rng.next_in(0.0, 180.0);
    spec.seed = mix_seed(seed, 4, static_cast<std::uint64_t>(i));
    spec.jitter = 0.02;
    std::snprintf(name, sizeof(name), "m%04d", i + 1);
    write_pair("malignant", name, render(spec));
  }
  return scan_dataset(out_dir);
}

}  // namespace busimorph
