#pragma once

#include <utility>
#include <vector>

#include "busimorph/errors.hpp"
#include "busimorph/image.hpp"

namespace busimorph {

namespace detail {

// 8-neighborhood in the order N, NE, E, SE, S, SW, W, NW.
inline void neighbors8(const MaskImage& m, int x, int y, int n[8]) {
  n[0] = m.at_or_zero(x, y - 1);
  n[1] = m.at_or_zero(x + 1, y - 1);
  n[2] = m.at_or_zero(x + 1, y);
  n[3] = m.at_or_zero(x + 1, y + 1);
  n[4] = m.at_or_zero(x, y + 1);
  n[5] = m.at_or_zero(x - 1, y + 1);
  n[6] = m.at_or_zero(x - 1, y);
  n[7] = m.at_or_zero(x - 1, y - 1);
}

inline int transitions01(const int n[8]) {
  int t = 0;
  for (int i = 0; i < 8; ++i) {
    if (n[i] == 0 && n[(i + 1) % 8] == 1) ++t;
  }
  return t;
}

}  // namespace detail

/// Zhang-Suen two-subiteration thinning. Deletions within a subiteration are
/// decided on a snapshot of the mask, so the result is order independent.
inline MaskImage thin_mask(const MaskImage& mask) {
  MaskImage img = mask;
  std::vector<std::pair<int, int>> kill;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int phase = 0; phase < 2; ++phase) {
      kill.clear();
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          if (!img.at(x, y)) continue;
          int n[8];
          detail::neighbors8(img, x, y, n);
          int b = 0;
          for (int v : n) b += v;
          if (b < 2 || b > 6) continue;
          if (detail::transitions01(n) != 1) continue;
          // n[0]=N, n[2]=E, n[4]=S, n[6]=W
          if (phase == 0) {
            if (n[0] * n[2] * n[4] != 0) continue;
            if (n[2] * n[4] * n[6] != 0) continue;
          } else {
            if (n[0] * n[2] * n[6] != 0) continue;
            if (n[0] * n[4] * n[6] != 0) continue;
          }
          kill.emplace_back(x, y);
        }
      }
      for (auto [kx, ky] : kill) img.set(kx, ky, 0);
      if (!kill.empty()) changed = true;
    }
  }
  return img;
}

/// Size of the thinned region in pixels.
inline int skeleton_size(const MaskImage& mask) {
  if (mask.foreground_count() == 0) {
    throw EmptyMask("skeleton_size: no foreground pixels");
  }
  return thin_mask(mask).foreground_count();
}

}  // namespace busimorph
