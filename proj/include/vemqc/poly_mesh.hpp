// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vemqc/geometry.hpp"

namespace vemqc {

struct BoundaryLoop {
  int label = 0;                 // 0 = outer loop, 1..m = inner loops
  std::vector<int> vertices;     // closed cycle, stored without repetition
};

struct PolygonMesh {
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> cells;   // CCW vertex-index loops
  std::vector<BoundaryLoop> loops;
  int level = 0;
  std::vector<int> parent_of_cell;       // empty when no coarse mesh exists

  Polygon cell_polygon(int c) const;
  double mesh_size() const;              // max cell diameter
  int num_inner_loops() const;
};

struct ShapeReport {
  double h = 0.0;                 // max cell diameter
  double min_edge_ratio = 0.0;    // min over cells of (min edge length / cell diameter)
  double star_kernel_ratio = 0.0; // min over cells of (kernel inscribed radius / cell diameter)
};

PolygonMesh load_mesh(std::istream& in);
PolygonMesh load_mesh(const std::string& path);
void save_mesh(const PolygonMesh& mesh, std::ostream& out);
void save_mesh(const PolygonMesh& mesh, const std::string& path);

// Checks all structural invariants; throws TopologyError on violation.
void validate_mesh(const PolygonMesh& mesh);

// Groups boundary edges into closed cycles. The loop whose bounding box
// contains all others gets label 0; inner loops are labeled 1..m ordered
// lexicographically by their minimal vertex coordinate.
std::vector<BoundaryLoop> detect_boundary_loops(const PolygonMesh& mesh);

// Splits every n-gon into n quadrilaterals by joining an interior fan
// point (the centroid, or a deep kernel point for nonconvex cells) to the
// edge midpoints.
PolygonMesh refine_to_quads(const PolygonMesh& mesh);

// Splits every quadrilateral into 4 by joining an interior fan point (the
// vertex average; for nonconvex quads the midpoint of the diagonal at the
// reflex corner) to the edge midpoints.
PolygonMesh refine_quads(const PolygonMesh& mesh);

ShapeReport shape_regularity(const PolygonMesh& mesh);

}  // namespace vemqc
