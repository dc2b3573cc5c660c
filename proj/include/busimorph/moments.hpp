#pragma once

#include <cmath>

#include "busimorph/errors.hpp"
#include "busimorph/image.hpp"

namespace busimorph {

/// Raw and central second-order moments of the foreground region.
struct Moments {
  double m00 = 0;
  double m10 = 0;
  double m01 = 0;
  double mu20 = 0;
  double mu02 = 0;
  double mu11 = 0;

  double centroid_x() const { return m10 / m00; }
  double centroid_y() const { return m01 / m00; }
};

inline Moments region_moments(const MaskImage& mask) {
  Moments m;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      m.m00 += 1.0;
      m.m10 += x;
      m.m01 += y;
    }
  }
  if (m.m00 == 0) throw EmptyMask("region_moments: no foreground pixels");
  const double cx = m.centroid_x();
  const double cy = m.centroid_y();
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double dx = x - cx;
      const double dy = y - cy;
      m.mu20 += dx * dx;
      m.mu02 += dy * dy;
      m.mu11 += dx * dy;
    }
  }
  return m;
}

/// Ramanujan's second approximation; exact enough that the error is below
/// 1e-6 relative for axis ratios up to 5.
inline double ellipse_perimeter(double a, double b) {
  if (a + b <= 0) return 0.0;
  const double h = ((a - b) / (a + b)) * ((a - b) / (a + b));
  const double pi = 3.14159265358979323846;
  return pi * (a + b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

/// Ellipse with the same centroid and second moments as the region, rescaled
/// so that pi*a*b equals the pixel count exactly.
struct EllipseFit {
  double cx = 0;
  double cy = 0;
  double a = 0;          // semi-major
  double b = 0;          // semi-minor
  double angle_deg = 0;  // major axis direction in [0, 180), y grows down
  double perimeter = 0;
};

inline EllipseFit equivalent_ellipse(const MaskImage& mask) {
  const Moments m = region_moments(mask);
  const double p = m.mu20 / m.m00;
  const double q = m.mu02 / m.m00;
  const double r = m.mu11 / m.m00;

  const double mean = 0.5 * (p + q);
  const double dev = std::sqrt(0.25 * (p - q) * (p - q) + r * r);
  const double lmax = mean + dev;
  const double lmin = mean - dev;
  if (lmin <= 1e-12) {
    throw DegenerateRegion("equivalent_ellipse: region has no width");
  }

  // Uniform ellipse with semi-axes (A, B) has eigenvalues (A^2/4, B^2/4).
  double a = 2.0 * std::sqrt(lmax);
  double b = 2.0 * std::sqrt(lmin);
  const double pi = 3.14159265358979323846;
  const double scale = std::sqrt(m.m00 / (pi * a * b));
  a *= scale;
  b *= scale;

  double angle = 0.5 * std::atan2(2.0 * r, p - q) * 180.0 / pi;
  if (angle < 0) angle += 180.0;
  if (angle >= 180.0) angle -= 180.0;

  EllipseFit fit;
  fit.cx = m.centroid_x();
  fit.cy = m.centroid_y();
  fit.a = a;
  fit.b = b;
  fit.angle_deg = angle;
  fit.perimeter = ellipse_perimeter(a, b);
  return fit;
}

}  // namespace busimorph
