// SPDX-License-Identifier: Apache-2.0
#include "vemqc/quadrature.hpp"

#include <cmath>

#include "vemqc/errors.hpp"

namespace vemqc {

std::vector<std::pair<double, double>> gauss_legendre_01(int n) {
  if (n < 1) throw Error("gauss_legendre_01: need at least one node");
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < n; ++i) {
    // Node i of the rule on [-1,1], found by Newton from the Chebyshev guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  return rule;
}

QuadRule edge_quadrature(const Point2& a, const Point2& b, int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  const double len = dist(a, b);
  QuadRule rule;
  rule.reserve(n);
  for (const auto& [s, w] : gauss_legendre_01(n)) rule.push_back({a + (b - a) * s, w * len});
  return rule;
}

namespace {

void append_triangle_rule(QuadRule& rule, const Point2& p0, const Point2& p1, const Point2& p2,
                          int degree) {
  const Point2 d1 = p1 - p0;
  const Point2 d2 = p2 - p0;
  const double area2 = cross(d1, d2);
  if (area2 <= 0.0) return;
  // Collapsed coordinates: x = p0 + u((1-v) d1 + v d2), Jacobian = u * area2.
  const int nu = std::max(1, (degree + 3) / 2);
  const int nv = std::max(1, (degree + 2) / 2);
  const auto gu = gauss_legendre_01(nu);
  const auto gv = gauss_legendre_01(nv);
  for (const auto& [u, wu] : gu)
    for (const auto& [v, wv] : gv) {
      const Point2 x = p0 + (d1 * (1.0 - v) + d2 * v) * u;
      rule.push_back({x, wu * wv * u * area2});
    }
}

}  // namespace

QuadRule polygon_quadrature(const Polygon& poly, int degree) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) throw Error("polygon_quadrature: polygon with fewer than 3 vertices");
  QuadRule rule;
  const Point2 c = polygon_centroid(poly);
  bool fan_ok = true;
  for (int i = 0; i < n; ++i) {
    if (cross(poly[i] - c, poly[(i + 1) % n] - c) < 0.0) {
      fan_ok = false;
      break;
    }
  }
  if (fan_ok) {
    for (int i = 0; i < n; ++i) append_triangle_rule(rule, c, poly[i], poly[(i + 1) % n], degree);
  } else {
    for (const auto& t : ear_clip(poly))
      append_triangle_rule(rule, poly[t[0]], poly[t[1]], poly[t[2]], degree);
  }
  return rule;
}

ScaledMonomialBasis::ScaledMonomialBasis(Point2 center, double h, int degree)
    : center_(center), h_(h), degree_(degree), dim_(dimension(degree)) {
  if (h <= 0.0) throw Error("ScaledMonomialBasis: nonpositive diameter");
}

std::pair<int, int> ScaledMonomialBasis::exponents(int alpha) {
  int deg = 0;
  while ((deg + 1) * (deg + 2) / 2 <= alpha) ++deg;
  const int offset = alpha - deg * (deg + 1) / 2;
  return {deg - offset, offset};
}

int ScaledMonomialBasis::index(int ax, int ay) {
  const int deg = ax + ay;
  return deg * (deg + 1) / 2 + ay;
}

double ScaledMonomialBasis::eval(int alpha, const Point2& p) const {
  const auto [ax, ay] = exponents(alpha);
  const double X = (p.x - center_.x) / h_;
  const double Y = (p.y - center_.y) / h_;
  double v = 1.0;
  for (int i = 0; i < ax; ++i) v *= X;
  for (int i = 0; i < ay; ++i) v *= Y;
  return v;
}

Point2 ScaledMonomialBasis::grad(int alpha, const Point2& p) const {
  const auto [ax, ay] = exponents(alpha);
  Point2 g{0.0, 0.0};
  if (ax > 0) g.x = ax / h_ * eval(index(ax - 1, ay), p);
  if (ay > 0) g.y = ay / h_ * eval(index(ax, ay - 1), p);
  return g;
}

double ScaledMonomialBasis::laplacian(int alpha, const Point2& p) const {
  const auto [ax, ay] = exponents(alpha);
  double v = 0.0;
  if (ax > 1) v += ax * (ax - 1) / (h_ * h_) * eval(index(ax - 2, ay), p);
  if (ay > 1) v += ay * (ay - 1) / (h_ * h_) * eval(index(ax, ay - 2), p);
  return v;
}

Eigen::VectorXd ScaledMonomialBasis::dx_coeffs(int alpha) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
  const auto [ax, ay] = exponents(alpha);
  if (ax > 0) c[index(ax - 1, ay)] = ax / h_;
  return c;
}

Eigen::VectorXd ScaledMonomialBasis::dy_coeffs(int alpha) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
  const auto [ax, ay] = exponents(alpha);
  if (ay > 0) c[index(ax, ay - 1)] = ay / h_;
  return c;
}

double ScaledMonomialBasis::eval_poly(const Eigen::VectorXd& coeffs, const Point2& p) const {
  double v = 0.0;
  for (int a = 0; a < coeffs.size(); ++a)
    if (coeffs[a] != 0.0) v += coeffs[a] * eval(a, p);
  return v;
}

Point2 ScaledMonomialBasis::grad_poly(const Eigen::VectorXd& coeffs, const Point2& p) const {
  Point2 g{0.0, 0.0};
  for (int a = 0; a < coeffs.size(); ++a)
    if (coeffs[a] != 0.0) {
      const Point2 ga = grad(a, p);
      g += ga * coeffs[a];
    }
  return g;
}

Eigen::VectorXd polygon_moments(const Polygon& poly, const ScaledMonomialBasis& basis,
                                int max_degree) {
  const int dim = ScaledMonomialBasis::dimension(max_degree);
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(dim);
  const int n = static_cast<int>(poly.size());
  // div(m_alpha (x - c)) = (|alpha| + 2) m_alpha, and (x - c).n is constant
  // along each straight edge, so each edge contributes a 1D polynomial
  // integral of degree |alpha|.
  const auto gl = gauss_legendre_01(std::max(1, (max_degree + 2) / 2));
  for (int i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double len = dist(a, b);
    if (len == 0.0) continue;
    const Point2 nrm = Point2{(b - a).y, -(b - a).x} / len;
    const double qn = dot(a - basis.center(), nrm);
    for (const auto& [s, w] : gl) {
      const Point2 x = a + (b - a) * s;
      for (int alpha = 0; alpha < dim; ++alpha)
        mom[alpha] += w * len * qn * basis.eval(alpha, x);
    }
  }
  for (int alpha = 0; alpha < dim; ++alpha) {
    const auto [ax, ay] = ScaledMonomialBasis::exponents(alpha);
    mom[alpha] /= (ax + ay + 2);
  }
  return mom;
}

}  // namespace vemqc
