// SPDX-License-Identifier: Apache-2.0
#include "vemqc/geometry.hpp"

#include <algorithm>
#include <limits>

#include "vemqc/errors.hpp"

namespace vemqc {

double signed_area(const Polygon& poly) {
  double a = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    a += cross(p, q);
  }
  return 0.5 * a;
}

Point2 polygon_centroid(const Polygon& poly) {
  double a = 0.0;
  Point2 c{0.0, 0.0};
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  if (a == 0.0) {
    // Degenerate polygon; fall back to the vertex average.
    Point2 avg{0.0, 0.0};
    for (const auto& p : poly) avg += p;
    return avg / static_cast<double>(n);
  }
  return c / (3.0 * a);
}

double polygon_diameter(const Polygon& poly) {
  double d = 0.0;
  for (size_t i = 0; i < poly.size(); ++i)
    for (size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, dist(poly[i], poly[j]));
  return d;
}

bool point_in_polygon(const Point2& p, const Polygon& poly, double tol) {
  if (tol > 0.0 && distance_point_polygon_boundary(p, poly) <= tol) return true;
  bool inside = false;
  const int n = static_cast<int>(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

double distance_point_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return dist(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + ab * t);
}

double distance_point_polygon_boundary(const Point2& p, const Polygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i)
    d = std::min(d, distance_point_segment(p, poly[i], poly[(i + 1) % n]));
  return d;
}

Polygon clip_half_plane(const Polygon& poly, const Point2& n, double c) {
  Polygon out;
  const int m = static_cast<int>(poly.size());
  if (m == 0) return out;
  out.reserve(m + 2);
  for (int i = 0; i < m; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % m];
    const double dp = dot(n, p) - c;
    const double dq = dot(n, q) - c;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + (q - p) * t);
    }
  }
  return out;
}

std::vector<std::array<int, 3>> ear_clip(const Polygon& poly) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) throw Error("ear_clip: polygon with fewer than 3 vertices");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;
  tris.reserve(n - 2);

  auto is_ear = [&](int a, int b, int c) {
    const Point2& pa = poly[a];
    const Point2& pb = poly[b];
    const Point2& pc = poly[c];
    if (cross(pb - pa, pc - pa) <= 0.0) return false;
    for (int j : idx) {
      if (j == a || j == b || j == c) continue;
      const Point2& p = poly[j];
      const double d1 = cross(pb - pa, p - pa);
      const double d2 = cross(pc - pb, p - pb);
      const double d3 = cross(pa - pc, p - pc);
      if (d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0) return false;
    }
    return true;
  };

  int guard = 0;
  while (idx.size() > 3) {
    const int m = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < m; ++i) {
      const int a = idx[(i + m - 1) % m];
      const int b = idx[i];
      const int c = idx[(i + 1) % m];
      if (is_ear(a, b, c)) {
        tris.push_back({a, b, c});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped || ++guard > 4 * n) throw Error("ear_clip: no ear found (degenerate polygon)");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

Polygon polygon_kernel(const Polygon& poly) {
  // Start from the bounding box and intersect the inner half plane of
  // every directed edge.
  double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  Polygon ker = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n && !ker.empty(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    // Inner side of edge a->b for a CCW polygon: cross(b-a, x-a) >= 0,
    // i.e. dot(n, x) <= c with n the outward edge normal.
    const Point2 nrm{(b - a).y, -(b - a).x};
    ker = clip_half_plane(ker, nrm, dot(nrm, a));
  }
  return ker;
}

namespace {

struct InscribedDisk {
  Point2 center;
  double radius = 0.0;
};

InscribedDisk largest_inscribed_disk(const Polygon& convex_poly) {
  const int n = static_cast<int>(convex_poly.size());
  if (n < 3) return {};
  // Constraints dot(u_i, x) + r <= b_i with unit outward normals u_i. The
  // optimum is attained at a triple of active constraints; enumerate them
  // and keep the best feasible candidate.
  std::vector<Point2> u(n);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) {
    const Point2& a = convex_poly[i];
    const Point2& c = convex_poly[(i + 1) % n];
    Point2 nrm{(c - a).y, -(c - a).x};
    const double len = norm(nrm);
    if (len == 0.0) {
      u[i] = {0.0, 0.0};
      b[i] = 0.0;
      continue;
    }
    u[i] = nrm / len;
    b[i] = dot(u[i], a);
  }
  auto feasible_radius = [&](const Point2& x) {
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (u[i].x == 0.0 && u[i].y == 0.0) continue;
      r = std::min(r, b[i] - dot(u[i], x));
    }
    return r;
  };
  InscribedDisk best{polygon_centroid(convex_poly), 0.0};
  best.radius = std::max(0.0, feasible_radius(best.center));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        // Solve dot(u_m, x) + r = b_m for m in {i, j, k}.
        const double A[3][3] = {{u[i].x, u[i].y, 1.0}, {u[j].x, u[j].y, 1.0}, {u[k].x, u[k].y, 1.0}};
        const double rhs[3] = {b[i], b[j], b[k]};
        const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                           A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                           A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
        if (std::abs(det) < 1e-14) continue;
        auto solve3 = [&](int col) {
          double M[3][3];
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) M[r][c] = (c == col) ? rhs[r] : A[r][c];
          return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                  M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                  M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])) /
                 det;
        };
        const Point2 x{solve3(0), solve3(1)};
        const double r = solve3(2);
        if (r <= best.radius) continue;
        if (feasible_radius(x) >= r - 1e-12 * (1.0 + std::abs(r)))
          best = {x, std::min(r, feasible_radius(x))};
      }
  return best;
}

}  // namespace

double chebyshev_radius(const Polygon& convex_poly) {
  return largest_inscribed_disk(convex_poly).radius;
}

Point2 chebyshev_center(const Polygon& convex_poly) {
  return largest_inscribed_disk(convex_poly).center;
}

}  // namespace vemqc
