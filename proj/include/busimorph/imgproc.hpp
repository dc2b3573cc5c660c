#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "busimorph/errors.hpp"
#include "busimorph/image.hpp"

namespace busimorph {

enum class Connectivity { Four = 4, Eight = 8 };

/// pixel >= threshold -> foreground.
inline MaskImage binarize(const GrayImage& img, int threshold) {
  MaskImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.pixels[i] = img.pixels[i] >= threshold ? 1 : 0;
  }
  return out;
}

/// Nearest-neighbor resize; source index = floor(i * src / dst), so integer
/// upscales replicate pixels into exact blocks.
inline MaskImage resize_nearest(const MaskImage& mask, int width, int height) {
  if (width <= 0 || height <= 0) throw InternalError("resize_nearest: non-positive target");
  MaskImage out(width, height);
  out.source = mask.source;
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>(static_cast<std::int64_t>(y) * mask.height / height);
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>(static_cast<std::int64_t>(x) * mask.width / width);
      out.set(x, y, mask.at(sx, sy) != 0);
    }
  }
  return out;
}

namespace detail {

inline std::array<std::pair<int, int>, 8> neighbor_offsets(Connectivity conn) {
  if (conn == Connectivity::Four) {
    return {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0, 0}, {0, 0}, {0, 0}, {0, 0}}};
  }
  return {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
}

}  // namespace detail

/// Label connected foreground components; returns the label grid (0 =
/// background, labels start at 1 in row-major discovery order) and per-label
/// pixel counts (index 0 unused).
inline std::vector<std::int32_t> label_components(const MaskImage& mask, Connectivity conn,
                                                  std::vector<std::int64_t>& counts) {
  const int nn = conn == Connectivity::Four ? 4 : 8;
  const auto offs = detail::neighbor_offsets(conn);
  std::vector<std::int32_t> labels(mask.pixels.size(), 0);
  counts.assign(1, 0);
  std::vector<std::pair<int, int>> stack;
  std::int32_t next = 1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y) || labels[static_cast<std::size_t>(y) * mask.width + x]) continue;
      std::int64_t count = 0;
      stack.push_back({x, y});
      labels[static_cast<std::size_t>(y) * mask.width + x] = next;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++count;
        for (int i = 0; i < nn; ++i) {
          int px = cx + offs[i].first, py = cy + offs[i].second;
          if (!mask.in_bounds(px, py) || !mask.at(px, py)) continue;
          std::int32_t& l = labels[static_cast<std::size_t>(py) * mask.width + px];
          if (!l) {
            l = next;
            stack.push_back({px, py});
          }
        }
      }
      counts.push_back(count);
      ++next;
    }
  }
  return labels;
}

/// Keep only the largest connected foreground component. Ties go to the
/// component whose first row-major pixel comes first; empty input is empty
/// output.
inline MaskImage largest_component(const MaskImage& mask,
                                   Connectivity conn = Connectivity::Eight) {
  std::vector<std::int64_t> counts;
  std::vector<std::int32_t> labels = label_components(mask, conn, counts);
  MaskImage out(mask.width, mask.height);
  out.source = mask.source;
  if (counts.size() <= 1) return out;

  std::int32_t best = 1;
  for (std::int32_t l = 2; l < static_cast<std::int32_t>(counts.size()); ++l) {
    if (counts[l] > counts[best]) best = l;  // first label wins ties by discovery order
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.pixels[i] = labels[i] == best ? 1 : 0;
  }
  return out;
}

}  // namespace busimorph
