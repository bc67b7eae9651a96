#pragma once

#include <cmath>
#include <vector>

namespace hetnet::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

/// Area of the intersection of two discs with radii r1, r2 whose centres are
/// d apart.
double lens_area(double r1, double r2, double d);

/// pi r1^2 + pi r2^2 - lens.
double union_area(double r1, double r2, double d);

using Polygon = std::vector<Vec2>;  // convex, counter-clockwise

Polygon square(double half_width);

/// Keeps the part of `poly` where (q - point).dot(normal) <= offset.
Polygon clip_halfplane(const Polygon& poly, Vec2 normal, double offset);

double polygon_area(const Polygon& poly);
bool contains(const Polygon& poly, Vec2 q);

/// Parameter range [t0, t1] of a + t (b - a) inside the convex polygon;
/// returns false when the line misses it.
bool clip_segment(const Polygon& poly, Vec2 a, Vec2 b, double& t0, double& t1);

}  // namespace hetnet::geom
