// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "vemqc/geometry.hpp"

namespace vemqc {

struct QuadPoint {
  Point2 x;
  double w;
};

using QuadRule = std::vector<QuadPoint>;

// Gauss-Legendre nodes and weights on [0,1], computed by Newton iteration
// on the Legendre recurrence.
std::vector<std::pair<double, double>> gauss_legendre_01(int n);

// Rule on the segment [a,b], exact for polynomials of the given degree in
// the arc-length parameter. Weights sum to the segment length.
QuadRule edge_quadrature(const Point2& a, const Point2& b, int degree);

// Rule on a simple polygon, exact for bivariate polynomials of the given
// degree. Centroid fan with a collapsed-coordinate tensor rule per
// triangle; falls back to ear clipping when the centroid fan is invalid.
QuadRule polygon_quadrature(const Polygon& poly, int degree);

// Monomials m_alpha(x) = ((x-c)/h)^ax * ((y-c)/h)^ay in graded
// lexicographic order: (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
class ScaledMonomialBasis {
 public:
  ScaledMonomialBasis(Point2 center, double h, int degree);

  static int dimension(int degree) { return (degree + 1) * (degree + 2) / 2; }
  static std::pair<int, int> exponents(int alpha);
  static int index(int ax, int ay);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  Point2 center() const { return center_; }
  double h() const { return h_; }

  double eval(int alpha, const Point2& p) const;
  Point2 grad(int alpha, const Point2& p) const;
  double laplacian(int alpha, const Point2& p) const;

  // Coefficient row vectors of d(m_alpha)/dx and /dy in this same basis
  // (degree drops by one; trailing entries zero).
  Eigen::VectorXd dx_coeffs(int alpha) const;
  Eigen::VectorXd dy_coeffs(int alpha) const;

  double eval_poly(const Eigen::VectorXd& coeffs, const Point2& p) const;
  Point2 grad_poly(const Eigen::VectorXd& coeffs, const Point2& p) const;

 private:
  Point2 center_;
  double h_;
  int degree_;
  int dim_;
};

// Integrals of every scaled monomial up to max_degree over the polygon,
// computed exactly edge by edge via the divergence theorem.
Eigen::VectorXd polygon_moments(const Polygon& poly, const ScaledMonomialBasis& basis,
                                int max_degree);

}  // namespace vemqc
