// SPDX-License-Identifier: Apache-2.0
#include "vemqc/poly_mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "vemqc/errors.hpp"

namespace vemqc {

Polygon PolygonMesh::cell_polygon(int c) const {
  Polygon poly;
  poly.reserve(cells[c].size());
  for (int v : cells[c]) poly.push_back(vertices[v]);
  return poly;
}

double PolygonMesh::mesh_size() const {
  double h = 0.0;
  for (size_t c = 0; c < cells.size(); ++c) h = std::max(h, polygon_diameter(cell_polygon(c)));
  return h;
}

int PolygonMesh::num_inner_loops() const {
  int m = 0;
  for (const auto& loop : loops)
    if (loop.label != 0) ++m;
  return m;
}

namespace {

// Strips '#' comments and returns a whitespace token stream.
std::stringstream tokenize(std::istream& in) {
  std::stringstream tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    tokens << line << '\n';
  }
  return tokens;
}

template <typename T>
T next_token(std::stringstream& s, const char* what) {
  T v;
  if (!(s >> v)) throw ParseError(std::string("mesh file: expected ") + what);
  return v;
}

void merge_close_vertices(PolygonMesh& mesh, double tol) {
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<int> remap(nv);
  std::vector<Point2> kept;
  for (int i = 0; i < nv; ++i) {
    int target = -1;
    for (int j = 0; j < static_cast<int>(kept.size()); ++j) {
      if (dist(kept[j], mesh.vertices[i]) < tol) {
        target = j;
        break;
      }
    }
    if (target < 0) {
      target = static_cast<int>(kept.size());
      kept.push_back(mesh.vertices[i]);
    }
    remap[i] = target;
  }
  if (static_cast<int>(kept.size()) == nv) return;
  mesh.vertices = kept;
  for (auto& cell : mesh.cells) {
    for (int& v : cell) v = remap[v];
    cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
    while (cell.size() > 1 && cell.front() == cell.back()) cell.pop_back();
  }
  for (auto& loop : mesh.loops) {
    for (int& v : loop.vertices) v = remap[v];
    loop.vertices.erase(std::unique(loop.vertices.begin(), loop.vertices.end()), loop.vertices.end());
    while (loop.vertices.size() > 1 && loop.vertices.front() == loop.vertices.back())
      loop.vertices.pop_back();
  }
}

struct EdgeUse {
  int count = 0;
  int forward = 0;  // uses in (a,b) direction with a < b
};

std::map<std::pair<int, int>, EdgeUse> edge_incidence(const PolygonMesh& mesh) {
  std::map<std::pair<int, int>, EdgeUse> edges;
  for (const auto& cell : mesh.cells) {
    const int m = static_cast<int>(cell.size());
    for (int i = 0; i < m; ++i) {
      const int a = cell[i];
      const int b = cell[(i + 1) % m];
      auto& use = edges[{std::min(a, b), std::max(a, b)}];
      ++use.count;
      if (a < b) ++use.forward;
    }
  }
  return edges;
}

bool segments_properly_intersect(const Point2& a, const Point2& b, const Point2& c,
                                 const Point2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

PolygonMesh load_mesh(std::istream& in) {
  auto tokens = tokenize(in);
  const auto magic = next_token<std::string>(tokens, "format magic");
  const auto version = next_token<int>(tokens, "format version");
  if (magic != "polymesh" || version != 1) throw ParseError("mesh file: unknown format header");
  const int nv = next_token<int>(tokens, "vertex count");
  const int nc = next_token<int>(tokens, "cell count");
  const int nl = next_token<int>(tokens, "loop count");
  if (nv < 0 || nc < 0 || nl < 0) throw ParseError("mesh file: negative count");
  PolygonMesh mesh;
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices) {
    p.x = next_token<double>(tokens, "vertex x");
    p.y = next_token<double>(tokens, "vertex y");
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ParseError("mesh file: non-finite vertex coordinate");
  }
  mesh.cells.resize(nc);
  for (auto& cell : mesh.cells) {
    const int m = next_token<int>(tokens, "cell vertex count");
    if (m < 3) throw ParseError("mesh file: cell with fewer than 3 vertices");
    cell.resize(m);
    for (int& v : cell) {
      v = next_token<int>(tokens, "cell vertex index");
      if (v < 0 || v >= nv) throw ParseError("mesh file: cell vertex index out of range");
    }
  }
  mesh.loops.resize(nl);
  for (auto& loop : mesh.loops) {
    loop.label = next_token<int>(tokens, "loop label");
    const int m = next_token<int>(tokens, "loop vertex count");
    if (m < 3) throw ParseError("mesh file: loop with fewer than 3 vertices");
    loop.vertices.resize(m);
    for (int& v : loop.vertices) {
      v = next_token<int>(tokens, "loop vertex index");
      if (v < 0 || v >= nv) throw ParseError("mesh file: loop vertex index out of range");
    }
  }
  merge_close_vertices(mesh, 1e-12);
  validate_mesh(mesh);
  return mesh;
}

PolygonMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  return load_mesh(in);
}

void save_mesh(const PolygonMesh& mesh, std::ostream& out) {
  out << "polymesh 1\n";
  out << mesh.vertices.size() << ' ' << mesh.cells.size() << ' ' << mesh.loops.size() << '\n';
  char buf[64];
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  for (const auto& cell : mesh.cells) {
    out << cell.size();
    for (int v : cell) out << ' ' << v;
    out << '\n';
  }
  for (const auto& loop : mesh.loops) {
    out << loop.label << ' ' << loop.vertices.size();
    for (int v : loop.vertices) out << ' ' << v;
    out << '\n';
  }
}

void save_mesh(const PolygonMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  save_mesh(mesh, out);
  if (!out) throw Error("failed writing mesh file: " + path);
}

void validate_mesh(const PolygonMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (const auto& p : mesh.vertices)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw TopologyError("mesh: non-finite vertex coordinate");

  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    const int m = static_cast<int>(cell.size());
    if (m < 3) throw TopologyError("mesh: cell with fewer than 3 vertices");
    std::vector<int> sorted(cell);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= nv)
      throw TopologyError("mesh: cell vertex index out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw TopologyError("mesh: cell repeats a vertex");
    const Polygon poly = mesh.cell_polygon(static_cast<int>(c));
    if (signed_area(poly) <= 0.0)
      throw TopologyError("mesh: cell with nonpositive area (cell " + std::to_string(c) + ")");
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (segments_properly_intersect(poly[i], poly[(i + 1) % m], poly[j], poly[(j + 1) % m]))
          throw TopologyError("mesh: self-intersecting cell (cell " + std::to_string(c) + ")");
  }

  const auto edges = edge_incidence(mesh);
  for (const auto& [key, use] : edges) {
    (void)key;
    if (use.count > 2) throw TopologyError("mesh: non-manifold edge (more than 2 cells)");
    if (use.count == 2 && use.forward != 1)
      throw TopologyError("mesh: interior edge traversed twice in the same direction");
  }

  if (!mesh.loops.empty()) {
    int outer = 0;
    std::map<std::pair<int, int>, int> loop_edges;
    for (const auto& loop : mesh.loops) {
      if (loop.label == 0) ++outer;
      const int m = static_cast<int>(loop.vertices.size());
      if (m < 3) throw TopologyError("mesh: boundary loop with fewer than 3 vertices");
      for (int i = 0; i < m; ++i) {
        const int a = loop.vertices[i];
        const int b = loop.vertices[(i + 1) % m];
        ++loop_edges[{std::min(a, b), std::max(a, b)}];
      }
    }
    if (outer != 1) throw TopologyError("mesh: expected exactly one boundary loop labeled 0");
    int boundary_count = 0;
    for (const auto& [key, use] : edges) {
      if (use.count != 1) continue;
      ++boundary_count;
      if (!loop_edges.count(key)) throw TopologyError("mesh: boundary edge missing from loops");
    }
    int loop_edge_count = 0;
    for (const auto& [key, cnt] : loop_edges) {
      (void)key;
      if (cnt != 1) throw TopologyError("mesh: duplicated edge in boundary loops");
      ++loop_edge_count;
    }
    if (loop_edge_count != boundary_count)
      throw TopologyError("mesh: boundary loops do not partition the boundary edges");
  }

  if (!mesh.parent_of_cell.empty() && mesh.parent_of_cell.size() != mesh.cells.size())
    throw TopologyError("mesh: parent link count does not match cell count");
}

std::vector<BoundaryLoop> detect_boundary_loops(const PolygonMesh& mesh) {
  // Boundary edges keep the orientation of their unique cell, so the outer
  // loop comes out CCW and inner loops CW.
  std::map<int, int> next;
  const auto edges = edge_incidence(mesh);
  for (const auto& cell : mesh.cells) {
    const int m = static_cast<int>(cell.size());
    for (int i = 0; i < m; ++i) {
      const int a = cell[i];
      const int b = cell[(i + 1) % m];
      if (edges.at({std::min(a, b), std::max(a, b)}).count == 1) {
        if (next.count(a)) throw TopologyError("mesh: boundary vertex with two outgoing edges");
        next[a] = b;
      }
    }
  }
  std::vector<BoundaryLoop> loops;
  std::map<int, bool> visited;
  for (const auto& [start, unused] : next) {
    (void)unused;
    if (visited[start]) continue;
    BoundaryLoop loop;
    int v = start;
    do {
      loop.vertices.push_back(v);
      visited[v] = true;
      auto it = next.find(v);
      if (it == next.end()) throw TopologyError("mesh: open boundary chain");
      v = it->second;
    } while (v != start);
    loops.push_back(std::move(loop));
  }
  if (loops.empty()) return loops;

  struct Box {
    double xmin, xmax, ymin, ymax;
    bool contains(const Box& o) const {
      return xmin <= o.xmin && xmax >= o.xmax && ymin <= o.ymin && ymax >= o.ymax;
    }
  };
  std::vector<Box> boxes(loops.size());
  for (size_t i = 0; i < loops.size(); ++i) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int v : loops[i].vertices) {
      b.xmin = std::min(b.xmin, mesh.vertices[v].x);
      b.xmax = std::max(b.xmax, mesh.vertices[v].x);
      b.ymin = std::min(b.ymin, mesh.vertices[v].y);
      b.ymax = std::max(b.ymax, mesh.vertices[v].y);
    }
    boxes[i] = b;
  }
  int outer = -1;
  for (size_t i = 0; i < loops.size(); ++i) {
    bool contains_all = true;
    for (size_t j = 0; j < loops.size(); ++j)
      if (j != i && !boxes[i].contains(boxes[j])) contains_all = false;
    if (contains_all) {
      outer = static_cast<int>(i);
      break;
    }
  }
  if (outer < 0) throw TopologyError("mesh: no boundary loop encloses all others");

  std::vector<int> inner;
  for (size_t i = 0; i < loops.size(); ++i)
    if (static_cast<int>(i) != outer) inner.push_back(static_cast<int>(i));
  auto min_vertex = [&](int li) {
    Point2 best = mesh.vertices[loops[li].vertices[0]];
    for (int v : loops[li].vertices) {
      const Point2& p = mesh.vertices[v];
      if (p.x < best.x || (p.x == best.x && p.y < best.y)) best = p;
    }
    return best;
  };
  std::sort(inner.begin(), inner.end(), [&](int a, int b) {
    const Point2 pa = min_vertex(a), pb = min_vertex(b);
    return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
  });

  std::vector<BoundaryLoop> out;
  loops[outer].label = 0;
  out.push_back(std::move(loops[outer]));
  int label = 1;
  for (int li : inner) {
    loops[li].label = label++;
    out.push_back(std::move(loops[li]));
  }
  return out;
}

namespace {

// Inserts the midpoint vertex of every loop edge into the loop cycles.
std::vector<BoundaryLoop> refine_loops(const std::vector<BoundaryLoop>& loops,
                                       const std::map<std::pair<int, int>, int>& edge_mid) {
  std::vector<BoundaryLoop> out;
  out.reserve(loops.size());
  for (const auto& loop : loops) {
    BoundaryLoop fine;
    fine.label = loop.label;
    const int m = static_cast<int>(loop.vertices.size());
    for (int i = 0; i < m; ++i) {
      const int a = loop.vertices[i];
      const int b = loop.vertices[(i + 1) % m];
      fine.vertices.push_back(a);
      fine.vertices.push_back(edge_mid.at({std::min(a, b), std::max(a, b)}));
    }
    out.push_back(std::move(fine));
  }
  return out;
}

}  // namespace

namespace {

bool strictly_in_kernel(const Polygon& poly, const Point2& p) {
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i)
    if (cross(poly[(i + 1) % m] - poly[i], p - poly[i]) <= 0.0) return false;
  return true;
}

bool is_convex(const Polygon& poly) {
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Point2 e_in = poly[i] - poly[(i + m - 1) % m];
    const Point2 e_out = poly[(i + 1) % m] - poly[i];
    if (cross(e_in, e_out) < 0.0) return false;
  }
  return true;
}

// Interior point the refinement fans out from. Non-convex cells fall back
// to the deepest kernel point so every child quad stays simple.
Point2 split_point(const Polygon& poly, const Point2& preferred, size_t c) {
  if (strictly_in_kernel(poly, preferred)) return preferred;
  const Polygon ker = polygon_kernel(poly);
  if (ker.size() >= 3) {
    const Point2 deep = chebyshev_center(ker);
    if (strictly_in_kernel(poly, deep)) return deep;
  }
  throw TopologyError("refine: cell " + std::to_string(c) + " has no usable star center");
}

}  // namespace

PolygonMesh refine_to_quads(const PolygonMesh& mesh) {
  PolygonMesh fine;
  fine.vertices = mesh.vertices;
  fine.level = mesh.level + 1;

  std::map<std::pair<int, int>, int> edge_mid;
  for (const auto& cell : mesh.cells) {
    const int m = static_cast<int>(cell.size());
    for (int i = 0; i < m; ++i) {
      const int a = cell[i];
      const int b = cell[(i + 1) % m];
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (!edge_mid.count(key)) {
        edge_mid[key] = static_cast<int>(fine.vertices.size());
        fine.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
      }
    }
  }

  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    const int m = static_cast<int>(cell.size());
    const Polygon poly = mesh.cell_polygon(static_cast<int>(c));
    // A non-convex cell fans from the deepest kernel point: its centroid
    // can sit arbitrarily close to a reflex edge extension even when it is
    // technically star-admissible, which would squash the children there.
    Point2 preferred = polygon_centroid(poly);
    if (!is_convex(poly)) {
      const Polygon ker = polygon_kernel(poly);
      if (ker.size() >= 3) preferred = chebyshev_center(ker);
    }
    const Point2 bc = split_point(poly, preferred, c);
    const int bc_id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(bc);
    for (int i = 0; i < m; ++i) {
      const int v = cell[i];
      const int vp = cell[(i + m - 1) % m];
      const int vn = cell[(i + 1) % m];
      const int m_prev = edge_mid.at({std::min(vp, v), std::max(vp, v)});
      const int m_next = edge_mid.at({std::min(v, vn), std::max(v, vn)});
      fine.cells.push_back({v, m_next, bc_id, m_prev});
      fine.parent_of_cell.push_back(static_cast<int>(c));
    }
  }

  fine.loops = refine_loops(mesh.loops, edge_mid);
  return fine;
}

PolygonMesh refine_quads(const PolygonMesh& mesh) {
  for (const auto& cell : mesh.cells)
    if (cell.size() != 4) throw TopologyError("refine_quads: mesh contains a non-quad cell");

  PolygonMesh fine;
  fine.vertices = mesh.vertices;
  fine.level = mesh.level + 1;

  std::map<std::pair<int, int>, int> edge_mid;
  for (const auto& cell : mesh.cells) {
    for (int i = 0; i < 4; ++i) {
      const int a = cell[i];
      const int b = cell[(i + 1) % 4];
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      if (!edge_mid.count(key)) {
        edge_mid[key] = static_cast<int>(fine.vertices.size());
        fine.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) * 0.5);
      }
    }
  }

  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    const Point2 p0 = mesh.vertices[cell[0]];
    const Point2 p1 = mesh.vertices[cell[1]];
    const Point2 p2 = mesh.vertices[cell[2]];
    const Point2 p3 = mesh.vertices[cell[3]];
    // Vertex average (bimedian intersection): iterating it drives convex
    // quads towards parallelograms, so quality stays bounded over levels.
    // A quad with a reflex vertex fans from the midpoint of the diagonal at
    // the reflex vertex instead: the child at the reflex corner is then an
    // exact half-scale copy of its parent, so corner cells stay self-similar
    // rather than degrading. split_point rejects anything outside the
    // kernel and picks a deep kernel point as a last resort.
    const Polygon quad{p0, p1, p2, p3};
    Point2 preferred = (p0 + p1 + p2 + p3) * 0.25;
    for (int i = 0; i < 4; ++i) {
      const Point2 e_in = quad[i] - quad[(i + 3) % 4];
      const Point2 e_out = quad[(i + 1) % 4] - quad[i];
      if (cross(e_in, e_out) < 0.0) {
        preferred = (quad[i] + quad[(i + 2) % 4]) * 0.5;
        break;
      }
    }
    const Point2 x = split_point(quad, preferred, c);
    const int x_id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(x);
    for (int i = 0; i < 4; ++i) {
      const int v = cell[i];
      const int vp = cell[(i + 3) % 4];
      const int vn = cell[(i + 1) % 4];
      const int m_prev = edge_mid.at({std::min(vp, v), std::max(vp, v)});
      const int m_next = edge_mid.at({std::min(v, vn), std::max(v, vn)});
      fine.cells.push_back({v, m_next, x_id, m_prev});
      fine.parent_of_cell.push_back(static_cast<int>(c));
    }
  }

  fine.loops = refine_loops(mesh.loops, edge_mid);
  return fine;
}

ShapeReport shape_regularity(const PolygonMesh& mesh) {
  ShapeReport report;
  report.min_edge_ratio = std::numeric_limits<double>::infinity();
  report.star_kernel_ratio = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const Polygon poly = mesh.cell_polygon(static_cast<int>(c));
    const double hd = polygon_diameter(poly);
    report.h = std::max(report.h, hd);
    const int m = static_cast<int>(poly.size());
    for (int i = 0; i < m; ++i)
      report.min_edge_ratio =
          std::min(report.min_edge_ratio, dist(poly[i], poly[(i + 1) % m]) / hd);
    const Polygon ker = polygon_kernel(poly);
    const double r = ker.size() >= 3 ? chebyshev_radius(ker) : 0.0;
    report.star_kernel_ratio = std::min(report.star_kernel_ratio, r / hd);
  }
  return report;
}

}  // namespace vemqc
