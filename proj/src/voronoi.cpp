// SPDX-License-Identifier: Apache-2.0
#include "vemqc/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "vemqc/errors.hpp"

namespace vemqc {

// ---------------------------------------------------------------------------
// DomainSpec

bool DomainSpec::contains(const Point2& p) const {
  if (!point_in_polygon(p, outer)) return false;
  for (const auto& hole : holes)
    if (point_in_polygon(p, hole)) return false;
  return true;
}

double DomainSpec::area() const {
  double a = std::abs(signed_area(outer));
  for (const auto& hole : holes) a -= std::abs(signed_area(hole));
  return a;
}

void DomainSpec::bbox(Point2& lo, Point2& hi) const {
  lo = hi = outer[0];
  for (const auto& p : outer) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
}

namespace {

bool polygon_rectilinear(const Polygon& poly) {
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Point2 d = poly[(i + 1) % n] - poly[i];
    if (d.x != 0.0 && d.y != 0.0) return false;
  }
  return true;
}

// Maximal y-intervals of the polygon along the vertical line x = x0,
// assuming a rectilinear polygon whose vertices avoid x0.
std::vector<std::pair<double, double>> vertical_slices(const Polygon& poly, double x0) {
  std::vector<double> ys;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    if ((a.x < x0) != (b.x < x0)) ys.push_back(a.y);
  }
  std::sort(ys.begin(), ys.end());
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i + 1 < ys.size(); i += 2) out.emplace_back(ys[i], ys[i + 1]);
  return out;
}

void subtract_interval(std::vector<std::pair<double, double>>& intervals, double lo, double hi) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : intervals) {
    if (hi <= a || lo >= b) {
      out.emplace_back(a, b);
      continue;
    }
    if (lo > a) out.emplace_back(a, lo);
    if (hi < b) out.emplace_back(hi, b);
  }
  intervals = std::move(out);
}

}  // namespace

std::vector<Polygon> DomainSpec::convex_pieces() const {
  bool rectilinear = polygon_rectilinear(outer);
  for (const auto& hole : holes) rectilinear = rectilinear && polygon_rectilinear(hole);

  std::vector<Polygon> pieces;
  if (rectilinear) {
    std::vector<double> xs;
    for (const auto& p : outer) xs.push_back(p.x);
    for (const auto& hole : holes)
      for (const auto& p : hole) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
      const double x0 = xs[i], x1 = xs[i + 1];
      const double mid = 0.5 * (x0 + x1);
      auto slices = vertical_slices(outer, mid);
      for (const auto& hole : holes)
        for (const auto& [a, b] : vertical_slices(hole, mid)) subtract_interval(slices, a, b);
      for (const auto& [ya, yb] : slices)
        pieces.push_back({{x0, ya}, {x1, ya}, {x1, yb}, {x0, yb}});
    }
    return pieces;
  }
  if (!holes.empty())
    throw GenerationError("domain: non-rectilinear polygon with holes is not supported");
  for (const auto& t : ear_clip(outer)) pieces.push_back({outer[t[0]], outer[t[1]], outer[t[2]]});
  return pieces;
}

DomainSpec DomainSpec::unit_square() {
  return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}};
}

DomainSpec DomainSpec::gamma_shape() {
  return {{{-1, -1}, {0, -1}, {0, 0}, {1, 0}, {1, 1}, {-1, 1}}, {}};
}

DomainSpec DomainSpec::square_hole() {
  return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
          {{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}}}};
}

DomainSpec DomainSpec::two_holes() {
  return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
          {{{0.15, 0.15}, {0.45, 0.15}, {0.45, 0.45}, {0.15, 0.45}},
           {{0.55, 0.55}, {0.85, 0.55}, {0.85, 0.85}, {0.55, 0.85}}}};
}

DomainSpec DomainSpec::by_name(const std::string& name) {
  if (name == "unit_square") return unit_square();
  if (name == "gamma_shape") return gamma_shape();
  if (name == "square_hole") return square_hole();
  if (name == "two_holes") return two_holes();
  throw ConfigError("unknown domain name: " + name);
}

// ---------------------------------------------------------------------------
// Vertex pool with tolerance snapping

namespace {

class VertexPool {
 public:
  explicit VertexPool(double tol) : tol_(tol), cell_(4.0 * tol) {}

  int insert(const Point2& p) {
    const long long ix = static_cast<long long>(std::floor(p.x / cell_));
    const long long iy = static_cast<long long>(std::floor(p.y / cell_));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = grid_.find(key(ix + dx, iy + dy));
        if (it == grid_.end()) continue;
        for (int id : it->second)
          if (dist(pts_[id], p) <= tol_) return id;
      }
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    grid_[key(ix, iy)].push_back(id);
    return id;
  }

  const std::vector<Point2>& points() const { return pts_; }

 private:
  static std::uint64_t key(long long ix, long long iy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
  }
  double tol_;
  double cell_;
  std::vector<Point2> pts_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
};

// Builds a validated mesh from loose cell polygons by snapping vertices.
PolygonMesh mesh_from_cells(const std::vector<Polygon>& cell_polys, double snap_tol) {
  VertexPool pool(snap_tol);
  PolygonMesh mesh;
  for (const auto& poly : cell_polys) {
    std::vector<int> cell;
    for (const auto& p : poly) {
      const int id = pool.insert(p);
      if (cell.empty() || cell.back() != id) cell.push_back(id);
    }
    while (cell.size() > 1 && cell.front() == cell.back()) cell.pop_back();
    if (cell.size() >= 3) mesh.cells.push_back(std::move(cell));
  }
  mesh.vertices = pool.points();
  return mesh;
}

}  // namespace

// ---------------------------------------------------------------------------
// Structured dual mesh

PolygonMesh gen_structured_voronoi(int n) {
  if (n < 2) throw GenerationError("gen_structured_voronoi: need n >= 2");
  const double step = 1.0 / n;
  auto vertex = [&](int i, int j) { return Point2{i * step, j * step}; };
  // Barycenters of the two triangles of square (i,j): the lower triangle
  // (i,j)-(i+1,j)-(i+1,j+1) and the upper (i,j)-(i+1,j+1)-(i,j+1).
  auto barycenter = [&](int i, int j, int t) {
    const Point2 a = vertex(i, j);
    const Point2 b = t == 0 ? vertex(i + 1, j) : vertex(i + 1, j + 1);
    const Point2 c = t == 0 ? vertex(i + 1, j + 1) : vertex(i, j + 1);
    return Point2{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
  };

  std::vector<Polygon> cell_polys;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const Point2 v = vertex(i, j);
      std::vector<Point2> ring;
      const int tris[6][3] = {{i, j, 0},         {i, j, 1},         {i - 1, j, 0},
                              {i - 1, j - 1, 0}, {i - 1, j - 1, 1}, {i, j - 1, 1}};
      for (const auto& t : tris)
        if (t[0] >= 0 && t[0] < n && t[1] >= 0 && t[1] < n)
          ring.push_back(barycenter(t[0], t[1], t[2]));
      const bool boundary = (i == 0 || i == n || j == 0 || j == n);
      if (boundary) {
        if (j == 0 || j == n) {
          if (i > 0) ring.push_back(Point2{(i - 0.5) * step, v.y});
          if (i < n) ring.push_back(Point2{(i + 0.5) * step, v.y});
        }
        if (i == 0 || i == n) {
          if (j > 0) ring.push_back(Point2{v.x, (j - 0.5) * step});
          if (j < n) ring.push_back(Point2{v.x, (j + 0.5) * step});
        }
      }
      std::vector<std::pair<double, Point2>> by_angle;
      for (const auto& p : ring) by_angle.emplace_back(std::atan2(p.y - v.y, p.x - v.x), p);
      std::sort(by_angle.begin(), by_angle.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      Polygon poly;
      if (!boundary) {
        for (const auto& [ang, p] : by_angle) poly.push_back(p);
      } else {
        // The cell closes through the grid vertex itself, placed in the
        // largest angular gap of the ring.
        const int m = static_cast<int>(by_angle.size());
        int gap_at = 0;
        double gap_best = -1.0;
        for (int a = 0; a < m; ++a) {
          const double next = by_angle[(a + 1) % m].first + (a + 1 == m ? 2.0 * M_PI : 0.0);
          const double gap = next - by_angle[a].first;
          if (gap > gap_best) {
            gap_best = gap;
            gap_at = (a + 1) % m;
          }
        }
        poly.push_back(v);
        for (int a = 0; a < m; ++a) poly.push_back(by_angle[(gap_at + a) % m].second);
      }
      cell_polys.push_back(std::move(poly));
    }

  PolygonMesh mesh = mesh_from_cells(cell_polys, 1e-12);
  mesh.loops = detect_boundary_loops(mesh);
  validate_mesh(mesh);
  return mesh;
}

// ---------------------------------------------------------------------------
// Random Lloyd-relaxed Voronoi

namespace {

class SeedGrid {
 public:
  SeedGrid(const std::vector<Point2>& seeds, const Point2& lo, const Point2& hi) : seeds_(seeds) {
    const int n = static_cast<int>(seeds.size());
    nx_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
    ny_ = nx_;
    lo_ = lo;
    sx_ = (hi.x - lo.x) / nx_;
    sy_ = (hi.y - lo.y) / ny_;
    if (sx_ <= 0.0) sx_ = 1.0;
    if (sy_ <= 0.0) sy_ = 1.0;
    buckets_.assign(static_cast<size_t>(nx_) * ny_, {});
    for (int i = 0; i < n; ++i) buckets_[bucket_of(seeds[i])].push_back(i);
  }

  // Indices (with distances) of all seeds other than `self` within `r` of
  // p, sorted by ascending distance.
  std::vector<std::pair<double, int>> within(const Point2& p, double r, int self) const {
    std::vector<std::pair<double, int>> out;
    const int ix0 = clampi(static_cast<int>(std::floor((p.x - r - lo_.x) / sx_)), 0, nx_ - 1);
    const int ix1 = clampi(static_cast<int>(std::floor((p.x + r - lo_.x) / sx_)), 0, nx_ - 1);
    const int iy0 = clampi(static_cast<int>(std::floor((p.y - r - lo_.y) / sy_)), 0, ny_ - 1);
    const int iy1 = clampi(static_cast<int>(std::floor((p.y + r - lo_.y) / sy_)), 0, ny_ - 1);
    for (int iy = iy0; iy <= iy1; ++iy)
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int q : buckets_[static_cast<size_t>(iy) * nx_ + ix]) {
          if (q == self) continue;
          const double d = dist(seeds_[q], p);
          if (d <= r) out.emplace_back(d, q);
        }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static int clampi(int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); }
  size_t bucket_of(const Point2& p) const {
    const int ix = clampi(static_cast<int>((p.x - lo_.x) / sx_), 0, nx_ - 1);
    const int iy = clampi(static_cast<int>((p.y - lo_.y) / sy_), 0, ny_ - 1);
    return static_cast<size_t>(iy) * nx_ + ix;
  }
  const std::vector<Point2>& seeds_;
  Point2 lo_;
  double sx_ = 1.0, sy_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

double max_dist_to_vertices(const Point2& p, const Polygon& poly) {
  double d = 0.0;
  for (const auto& v : poly) d = std::max(d, dist(p, v));
  return d;
}

// Voronoi region of seed `s` restricted to one convex piece: clip the piece
// by the bisector half plane of every seed that can matter. Candidates are
// processed by ascending distance; once 2*max|x-s| over the current polygon
// is below the candidate distance, no remaining seed can cut.
Polygon clip_piece(const Polygon& piece, int s, const std::vector<Point2>& seeds,
                   const SeedGrid& grid, double r0) {
  const Point2 sp = seeds[s];
  double radius = std::max(r0, 1e-12);
  while (true) {
    Polygon poly = piece;
    bool done = false;
    const auto cand = grid.within(sp, radius, s);
    for (const auto& [d, q] : cand) {
      const double reach = 2.0 * max_dist_to_vertices(sp, poly);
      if (d > reach) {
        done = true;
        break;
      }
      const Point2 dir = seeds[q] - sp;
      const Point2 mid = (seeds[q] + sp) * 0.5;
      poly = clip_half_plane(poly, dir, dot(dir, mid));
      if (poly.size() < 3) return {};
    }
    if (!done && 2.0 * max_dist_to_vertices(sp, poly) > radius) {
      radius *= 2.0;
      continue;
    }
    return poly;
  }
}

struct CellPieces {
  std::vector<Polygon> parts;
  double area = 0.0;
  Point2 centroid{0, 0};
  double reach = 0.0;  // max distance from seed to any part vertex
};

std::vector<CellPieces> compute_cells(const std::vector<Point2>& seeds,
                                      const std::vector<Polygon>& pieces, const Point2& lo,
                                      const Point2& hi, double r0) {
  SeedGrid grid(seeds, lo, hi);
  std::vector<CellPieces> cells(seeds.size());
  for (size_t s = 0; s < seeds.size(); ++s) {
    auto& cell = cells[s];
    Point2 weighted{0, 0};
    for (const auto& piece : pieces) {
      Polygon part = clip_piece(piece, static_cast<int>(s), seeds, grid, r0);
      if (part.size() < 3) continue;
      const double a = signed_area(part);
      if (a <= 0.0) continue;
      cell.area += a;
      const Point2 c = polygon_centroid(part);
      weighted += c * a;
      cell.reach = std::max(cell.reach, max_dist_to_vertices(seeds[s], part));
      cell.parts.push_back(std::move(part));
    }
    if (cell.area > 0.0) cell.centroid = weighted / cell.area;
  }
  return cells;
}

// Collapse edges that are tiny relative to their cell. Clipping near a
// domain corner can leave edges orders of magnitude below the local mesh
// size, and midpoint refinement would turn them into sliver cells whose
// local matrices are numerically useless. Domain corners are immovable;
// other boundary vertices may only merge along the boundary.
void collapse_short_edges(PolygonMesh& mesh, const DomainSpec& domain, double ratio) {
  const double tol = 1e-7;
  std::vector<Polygon> boundaries = domain.holes;
  boundaries.push_back(domain.outer);
  auto vertex_rank = [&](const Point2& p) {
    int rank = 0;
    for (const auto& poly : boundaries) {
      for (const auto& v : poly)
        if (dist(p, v) <= tol) return 2;
      if (rank == 0 && distance_point_polygon_boundary(p, poly) <= tol) rank = 1;
    }
    return rank;
  };
  auto on_boundary = [&](const Point2& p) {
    for (const auto& poly : boundaries)
      if (distance_point_polygon_boundary(p, poly) <= tol) return true;
    return false;
  };

  // Replaces `drop` by `keep` everywhere and moves `keep` to `target`, but
  // only if every affected cell stays a simple positively oriented polygon.
  auto try_collapse = [&](int keep, int drop, const Point2& target) {
    for (const auto& cell : mesh.cells) {
      bool affected = false;
      for (int v : cell) affected = affected || v == keep || v == drop;
      if (!affected) continue;
      std::vector<int> merged;
      for (int v : cell) {
        const int w = v == drop ? keep : v;
        if (merged.empty() || merged.back() != w) merged.push_back(w);
      }
      while (merged.size() > 1 && merged.front() == merged.back()) merged.pop_back();
      if (merged.size() < 3) return false;
      std::vector<int> sorted = merged;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
      Polygon poly;
      for (int v : merged) poly.push_back(v == keep ? target : mesh.vertices[v]);
      if (signed_area(poly) <= 0.0) return false;
    }
    for (auto& cell : mesh.cells) {
      std::vector<int> merged;
      for (int v : cell) {
        const int w = v == drop ? keep : v;
        if (merged.empty() || merged.back() != w) merged.push_back(w);
      }
      while (merged.size() > 1 && merged.front() == merged.back()) merged.pop_back();
      cell = std::move(merged);
    }
    mesh.vertices[keep] = target;
    return true;
  };

  std::set<std::pair<int, int>> rejected;
  for (int guard = 0; guard < 256; ++guard) {
    int va = -1, vb = -1;
    double shortest = std::numeric_limits<double>::max();
    for (size_t c = 0; c < mesh.cells.size(); ++c) {
      const auto& cell = mesh.cells[c];
      const double limit = ratio * polygon_diameter(mesh.cell_polygon(static_cast<int>(c)));
      const int m = static_cast<int>(cell.size());
      for (int i = 0; i < m; ++i) {
        const int a = cell[i], b = cell[(i + 1) % m];
        if (rejected.count(std::minmax(a, b))) continue;
        const double len = dist(mesh.vertices[a], mesh.vertices[b]);
        if (len < limit && len < shortest) {
          shortest = len;
          va = a;
          vb = b;
        }
      }
    }
    if (va < 0) break;

    const int ra = vertex_rank(mesh.vertices[va]);
    const int rb = vertex_rank(mesh.vertices[vb]);
    int keep = va, drop = vb;
    if (rb > ra) std::swap(keep, drop);
    Point2 target = mesh.vertices[keep];
    bool admissible = true;
    if (ra == rb) {
      if (ra == 2) {
        admissible = false;  // both endpoints are domain corners
      } else {
        target = (mesh.vertices[va] + mesh.vertices[vb]) * 0.5;
        if (ra == 1) admissible = on_boundary(target);
      }
    }
    if (!admissible || !try_collapse(keep, drop, target)) rejected.insert(std::minmax(va, vb));
  }

  // Compact vertex ids: collapsed vertices are no longer referenced.
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::vector<Point2> verts;
  for (auto& cell : mesh.cells)
    for (int& v : cell) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(verts.size());
        verts.push_back(mesh.vertices[v]);
      }
      v = remap[v];
    }
  mesh.vertices = std::move(verts);
}

}  // namespace

PolygonMesh gen_random_voronoi(const DomainSpec& domain, int n_seeds, unsigned long seed,
                               int lloyd_iters) {
  if (n_seeds < 4) throw GenerationError("gen_random_voronoi: need at least 4 seeds");
  const auto pieces = domain.convex_pieces();
  Point2 lo, hi;
  domain.bbox(lo, hi);

  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  std::vector<Point2> seeds;
  seeds.reserve(n_seeds);
  long long guard = 0;
  while (static_cast<int>(seeds.size()) < n_seeds) {
    const Point2 p{lo.x + (hi.x - lo.x) * uniform01(), lo.y + (hi.y - lo.y) * uniform01()};
    if (domain.contains(p)) seeds.push_back(p);
    if (++guard > 1000LL * n_seeds + 100000LL)
      throw GenerationError("gen_random_voronoi: rejection sampling failed");
  }

  const double r0 = 4.0 * std::sqrt(domain.area() / n_seeds);
  auto cells = compute_cells(seeds, pieces, lo, hi, r0);
  for (int iter = 0; iter < lloyd_iters; ++iter) {
    double movement = 0.0;
    double h_est = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      if (cells[s].area <= 0.0) continue;
      movement = std::max(movement, dist(seeds[s], cells[s].centroid));
      h_est = std::max(h_est, cells[s].reach);
      seeds[s] = cells[s].centroid;
    }
    cells = compute_cells(seeds, pieces, lo, hi, r0);
    if (movement < 1e-3 * h_est) break;
  }

  // Glue the per-seed pieces: snap vertices, split edges at incident
  // vertices, cancel opposite directed edges, then walk the remaining
  // cycles.
  const double snap_tol = 1e-9;
  VertexPool pool(snap_tol);
  std::vector<Polygon> cell_polys;
  for (int s = 0; s < n_seeds; ++s) {
    std::vector<std::vector<int>> part_ids;
    std::vector<int> vset;
    for (const auto& part : cells[s].parts) {
      std::vector<int> ids;
      for (const auto& p : part) {
        const int id = pool.insert(p);
        if (ids.empty() || ids.back() != id) ids.push_back(id);
      }
      while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
      if (ids.size() >= 3) {
        vset.insert(vset.end(), ids.begin(), ids.end());
        part_ids.push_back(std::move(ids));
      }
    }
    if (part_ids.empty()) continue;
    std::sort(vset.begin(), vset.end());
    vset.erase(std::unique(vset.begin(), vset.end()), vset.end());

    // Directed edges, with collinear pool vertices inserted so that the
    // two sides of an internal piece boundary subdivide identically.
    std::map<std::pair<int, int>, int> edge_count;
    const auto& pts = pool.points();
    for (const auto& ids : part_ids) {
      const int m = static_cast<int>(ids.size());
      for (int i = 0; i < m; ++i) {
        const int a = ids[i];
        const int b = ids[(i + 1) % m];
        std::vector<std::pair<double, int>> chain;
        const Point2 pa = pts[a], pb = pts[b];
        const double len2 = dot(pb - pa, pb - pa);
        for (int v : vset) {
          if (v == a || v == b) continue;
          if (distance_point_segment(pts[v], pa, pb) > snap_tol) continue;
          const double t = dot(pts[v] - pa, pb - pa) / len2;
          if (t > 0.0 && t < 1.0) chain.emplace_back(t, v);
        }
        std::sort(chain.begin(), chain.end());
        int prev = a;
        for (const auto& [t, v] : chain) {
          ++edge_count[{prev, v}];
          prev = v;
        }
        ++edge_count[{prev, b}];
      }
    }

    std::map<int, int> succ;
    for (const auto& [e, cnt] : edge_count) {
      const auto rev = edge_count.find({e.second, e.first});
      const int net = cnt - (rev == edge_count.end() ? 0 : rev->second);
      if (net <= 0) continue;
      if (net != 1 || succ.count(e.first))
        throw GenerationError("gen_random_voronoi: degenerate seed configuration (glue failure)");
      succ[e.first] = e.second;
    }
    std::map<int, bool> used;
    for (const auto& [start, unused2] : succ) {
      (void)unused2;
      if (used[start]) continue;
      Polygon poly;
      int v = start;
      do {
        poly.push_back(pts[v]);
        used[v] = true;
        const auto it = succ.find(v);
        if (it == succ.end())
          throw GenerationError("gen_random_voronoi: degenerate seed configuration (open chain)");
        v = it->second;
      } while (v != start);
      if (poly.size() < 3 || signed_area(poly) <= 0.0)
        throw GenerationError("gen_random_voronoi: degenerate seed configuration (bad cell)");
      cell_polys.push_back(std::move(poly));
    }
  }

  PolygonMesh mesh = mesh_from_cells(cell_polys, snap_tol);

  // Remove vertices that are collinear in every cell using them: these are
  // artifacts of the convex decomposition, not Voronoi features.
  {
    std::vector<int> usage(mesh.vertices.size(), 0);
    std::vector<bool> removable(mesh.vertices.size(), true);
    for (const auto& cell : mesh.cells) {
      const int m = static_cast<int>(cell.size());
      for (int i = 0; i < m; ++i) {
        const int v = cell[i];
        ++usage[v];
        const Point2 a = mesh.vertices[cell[(i + m - 1) % m]];
        const Point2 b = mesh.vertices[v];
        const Point2 c = mesh.vertices[cell[(i + 1) % m]];
        const double s = std::abs(cross(b - a, c - b));
        if (s > 1e-6 * norm(b - a) * norm(c - b) || dot(b - a, c - b) <= 0.0) removable[v] = false;
      }
    }
    for (size_t v = 0; v < usage.size(); ++v)
      if (usage[v] > 2) removable[v] = false;
    for (auto& cell : mesh.cells) {
      std::vector<int> kept;
      for (int v : cell)
        if (!removable[v]) kept.push_back(v);
      if (kept.size() >= 3) cell = std::move(kept);
    }
    // Compact vertex ids.
    std::vector<int> remap(mesh.vertices.size(), -1);
    std::vector<Point2> verts;
    for (auto& cell : mesh.cells)
      for (int& v : cell) {
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(verts.size());
          verts.push_back(mesh.vertices[v]);
        }
        v = remap[v];
      }
    mesh.vertices = std::move(verts);
  }

  collapse_short_edges(mesh, domain, 0.05);

  mesh.loops = detect_boundary_loops(mesh);
  validate_mesh(mesh);
  if (static_cast<int>(mesh.cells.size()) < n_seeds - n_seeds / 10)
    throw GenerationError("gen_random_voronoi: lost more than 10% of the seeds");
  double total = 0.0;
  for (size_t c = 0; c < mesh.cells.size(); ++c) total += signed_area(mesh.cell_polygon(c));
  if (std::abs(total - domain.area()) > 1e-6 * domain.area())
    throw GenerationError("gen_random_voronoi: cells do not tile the domain");
  return mesh;
}

}  // namespace vemqc
