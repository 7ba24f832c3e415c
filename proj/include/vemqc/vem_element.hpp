// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "vemqc/quadrature.hpp"

namespace vemqc {

using ScalarFn = std::function<double(const Point2&)>;
using VectorFn = std::function<Point2(const Point2&)>;

// Local virtual element of order k on one polygonal cell.
//
// Dof layout: vertex values (nv), then edge-midpoint values (nv, k=2 only,
// midpoint i on the edge vertex i -> vertex i+1), then the cell moment
// (v,1)_D (k=2 only).
//
// Pi1 maps local dofs to the coefficients (in `basis`) of the projection
// that is orthogonal w.r.t. (grad u, grad v)_D + (int_bnd u)(int_bnd v).
// Pi0 additionally matches the cell average (identical to Pi1 for k=1).
struct LocalElement {
  int k = 1;
  Polygon poly;
  int nv = 0;
  int ndof = 0;
  double area = 0.0;
  Point2 centroid;
  double diameter = 0.0;
  ScaledMonomialBasis basis{Point2{0, 0}, 1.0, 1};
  Eigen::VectorXd moments;       // scaled-monomial integrals up to degree 2k
  Eigen::MatrixXd Pi1;           // dim P_k x ndof
  Eigen::MatrixXd Pi0;           // dim P_k x ndof
  Eigen::MatrixXd A;             // stabilized stiffness, ndof x ndof
  Eigen::MatrixXd M0;            // (Pi0 u, Pi0 v)_D, ndof x ndof
  Eigen::RowVectorXd mean_row;   // (Pi0 v, 1)_D, 1 x ndof
  std::vector<Point2> nodes;     // boundary nodes: vertices (+ midpoints, k=2)

  int num_boundary_nodes() const { return k == 1 ? nv : 2 * nv; }
};

LocalElement build_element(const Polygon& poly, int k);

// Load vectors (f, curl Pi1 psi_i)_D, (f, grad Pi1 psi_i)_D and
// (g, Pi0 psi_i)_D, integrated with a rule of degree 2k+4.
Eigen::VectorXd local_load_curl(const LocalElement& el, const VectorFn& f);
Eigen::VectorXd local_load_grad(const LocalElement& el, const VectorFn& f);
Eigen::VectorXd local_load_l2(const LocalElement& el, const ScalarFn& g);

// Dof vector of the interpolant: nodal values plus (k=2) the cell moment
// by quadrature.
Eigen::VectorXd interpolate(const LocalElement& el, const ScalarFn& g);

// Coefficient vectors (in el.basis) of the components of curl p and grad p
// for a scalar polynomial with coefficients p. curl p = (dp/dy, -dp/dx).
std::pair<Eigen::VectorXd, Eigen::VectorXd> curl_coeffs(const LocalElement& el,
                                                        const Eigen::VectorXd& p);
std::pair<Eigen::VectorXd, Eigen::VectorXd> grad_coeffs(const LocalElement& el,
                                                        const Eigen::VectorXd& p);

}  // namespace vemqc
