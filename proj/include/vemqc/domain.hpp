// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vemqc/geometry.hpp"

namespace vemqc {

// Polygon-with-holes domain. The outer boundary is CCW; holes are given
// as CCW polygons describing the excluded regions.
struct DomainSpec {
  Polygon outer;
  std::vector<Polygon> holes;

  bool contains(const Point2& p) const;
  double area() const;

  // Axis-aligned bounding box of the outer polygon.
  void bbox(Point2& lo, Point2& hi) const;

  // Partition into convex polygons used for Voronoi clipping. Rectilinear
  // domains are cut into slab rectangles; other hole-free domains fall
  // back to ear-clipped triangles.
  std::vector<Polygon> convex_pieces() const;

  static DomainSpec unit_square();
  static DomainSpec gamma_shape();   // (-1,1)^2 minus the quadrant [0,1]x[-1,0]
  static DomainSpec square_hole();   // (0,1)^2 minus [1/4,3/4]^2
  static DomainSpec two_holes();     // (0,1)^2 minus [0.15,0.45]^2 and [0.55,0.85]^2
  static DomainSpec by_name(const std::string& name);
};

}  // namespace vemqc
