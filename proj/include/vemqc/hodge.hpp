// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vemqc/scalar_vem.hpp"

namespace vemqc {

struct QuadCurlProblem {
  std::shared_ptr<const VemSpace> space;
  double beta = 0.0;
  double gamma = 0.0;
  VectorFn f;
};

// Piecewise polynomial vector field, one coefficient vector per cell in
// that cell's scaled monomial basis.
struct VectorPolyField {
  std::shared_ptr<const VemSpace> space;
  Eigen::MatrixXd cx, cy;  // dim P_k x n_cells

  Point2 eval(int cell, const Point2& p) const {
    const auto& basis = space->element(cell).basis;
    return {basis.eval_poly(cx.col(cell), p), basis.eval_poly(cy.col(cell), p)};
  }
};

struct HodgeSolution {
  ScalarField potential;   // rho_h (gamma=0) or zeta_h (gamma>0)
  ScalarField xi_h;
  ScalarField phi_h;
  std::vector<ScalarField> harmonics;
  std::vector<double> coeffs;
  VectorPolyField u_h;
};

// gamma = 0 chain: rho_h from the mean-pinned Neumann problem with load
// (f, curl Pi1 psi), then xi_h from two Dirichlet solves combined to zero
// mean.
std::pair<ScalarField, ScalarField> solve_gamma0(const QuadCurlProblem& problem);

// gamma > 0 chain: one monolithic block system over V_h x V0_h solved for
// two right-hand sides and combined to zero xi mean.
std::pair<ScalarField, ScalarField> solve_gamma_pos(const QuadCurlProblem& problem);

// Mean-pinned Neumann solve with load (Pi0 xi_h, Pi0 psi).
ScalarField solve_phi(const ScalarField& xi_h);

// Discrete harmonic fields: a_h(phi_j, v) = 0 with trace 1 on inner loop j
// and 0 on all other loops.
std::vector<ScalarField> solve_harmonics(std::shared_ptr<const VemSpace> space);

// m x m SPD system a_h(phi_i, phi_j) c_j = gamma^{-1} (f, grad Pi1 phi_i).
std::vector<double> solve_coefficients(const std::vector<ScalarField>& harmonics,
                                       const VectorFn& f, double gamma);

// u_h = curl Pi1 phi_h + sum_j c_j grad Pi1 phi_j, cellwise.
VectorPolyField reconstruct_u(const ScalarField& phi_h, const std::vector<ScalarField>& harmonics,
                              const std::vector<double>& coeffs);

HodgeSolution solve(const QuadCurlProblem& problem);

}  // namespace vemqc
