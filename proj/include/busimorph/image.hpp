#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "busimorph/errors.hpp"

namespace busimorph {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw InternalError("GrayImage: non-positive dimensions");
  }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Binary raster of a tumor region. Pixel values are exactly 0 or 1.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::string source;  // provenance path, may be empty

  MaskImage() = default;
  MaskImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {
    if (w <= 0 || h <= 0) throw InternalError("MaskImage: non-positive dimensions");
  }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, bool on) {
    pixels[static_cast<std::size_t>(y) * width + x] = on ? 1 : 0;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  /// Bounds-checked read; out-of-image counts as background.
  std::uint8_t at_or_zero(int x, int y) const {
    return in_bounds(x, y) ? at(x, y) : 0;
  }

  std::int64_t foreground_count() const {
    std::int64_t n = 0;
    for (std::uint8_t p : pixels) n += p;
    return n;
  }

  bool operator==(const MaskImage& o) const {
    return width == o.width && height == o.height && pixels == o.pixels;
  }
};

}  // namespace busimorph
