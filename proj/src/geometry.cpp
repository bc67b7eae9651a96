#include "hetnet/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace hetnet::geom {

double lens_area(double r1, double r2, double d) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return std::numbers::pi * rmin * rmin;
  const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
  const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
  // Heron-style product, clamped against round-off near tangency
  const double k = std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2));
  return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(k);
}

double union_area(double r1, double r2, double d) {
  constexpr double pi = std::numbers::pi;
  return pi * r1 * r1 + pi * r2 * r2 - lens_area(r1, r2, d);
}

Polygon square(double h) { return {{-h, -h}, {h, -h}, {h, h}, {-h, h}}; }

Polygon clip_halfplane(const Polygon& poly, Vec2 normal, double offset) {
  Polygon out;
  const std::size_t n = poly.size();
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double fa = normal.dot(a) - offset;
    const double fb = normal.dot(b) - offset;
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      const double t = fa / (fa - fb);
      out.push_back(a + (b - a) * t);
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += poly[i].cross(poly[(i + 1) % poly.size()]);
  return 0.5 * std::abs(s);
}

bool contains(const Polygon& poly, Vec2 q) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    if ((b - a).cross(q - a) < 0.0) return false;
  }
  return true;
}

bool clip_segment(const Polygon& poly, Vec2 a, Vec2 b, double& t0, double& t1) {
  if (poly.size() < 3) return false;
  const Vec2 dir = b - a;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 e = poly[(i + 1) % poly.size()] - p;
    // inside: e x (a + t dir - p) >= 0
    const double c0 = e.cross(a - p);
    const double c1 = e.cross(dir);
    if (c1 == 0.0) {
      if (c0 < 0.0) return false;
      continue;
    }
    const double t = -c0 / c1;
    if (c1 > 0.0) lo = std::max(lo, t);
    else hi = std::min(hi, t);
  }
  if (!(lo < hi)) return false;
  t0 = lo;
  t1 = hi;
  return true;
}

}  // namespace hetnet::geom
