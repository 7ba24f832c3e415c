// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace vemqc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2() = default;
  Point2(double x_, double y_) : x(x_), y(y_) {}

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2 operator/(double s) const { return {x / s, y / s}; }
  Point2& operator+=(const Point2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

inline Point2 operator*(double s, const Point2& p) { return p * s; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& p) { return std::hypot(p.x, p.y); }
inline double dist(const Point2& a, const Point2& b) { return norm(a - b); }

using Polygon = std::vector<Point2>;

// Signed area, positive for counterclockwise vertex order.
double signed_area(const Polygon& poly);

Point2 polygon_centroid(const Polygon& poly);

// Maximum pairwise vertex distance.
double polygon_diameter(const Polygon& poly);

// Crossing-number test; points within tol of the boundary count as inside.
bool point_in_polygon(const Point2& p, const Polygon& poly, double tol = 0.0);

double distance_point_segment(const Point2& p, const Point2& a, const Point2& b);

double distance_point_polygon_boundary(const Point2& p, const Polygon& poly);

// Intersection of the polygon with the half plane {x : dot(n, x) <= c}.
// The input need not be convex; the output is the clipped vertex chain.
Polygon clip_half_plane(const Polygon& poly, const Point2& n, double c);

// Triangulates a simple polygon (CCW) by ear clipping. Each entry is a
// vertex-index triple into the input.
std::vector<std::array<int, 3>> ear_clip(const Polygon& poly);

// Kernel of a simple CCW polygon (set of points seeing every vertex),
// possibly empty.
Polygon polygon_kernel(const Polygon& poly);

// Largest inscribed disk of a convex polygon.
double chebyshev_radius(const Polygon& convex_poly);
Point2 chebyshev_center(const Polygon& convex_poly);

}  // namespace vemqc
