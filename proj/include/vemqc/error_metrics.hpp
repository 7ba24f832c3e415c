// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vemqc/hodge.hpp"

namespace vemqc {

// Exact-solution errors, integrated cellwise with a rule of degree 2k+4.
double l2_error_u(const VectorPolyField& u_h, const VectorFn& u_exact);
double h1_broken_error_xi(const ScalarField& xi_h, const VectorFn& grad_xi_exact);

// Tangential boundary error of the reconstructed field. l2 integrates
// (n x u_h)^2 edgewise at degree 2k; max_nodal takes the per-edge maximum
// over boundary nodes (corners contribute once per adjacent edge).
struct BoundaryTangentialError {
  double l2 = 0.0;
  double max_nodal = 0.0;
};
BoundaryTangentialError boundary_tangential_error(const VectorPolyField& u_h);

// Inter-level errors on nested meshes: the coarse field is evaluated on
// fine cells through the parent-cell polynomial, the norm is taken on the
// fine mesh, and the result is relative to the fine field's norm.
double inter_level_relative_u(const VectorPolyField& u_coarse, const VectorPolyField& u_fine);
double inter_level_relative_xi(const ScalarField& xi_coarse, const ScalarField& xi_fine);

// Per-hole |c_j^coarse - c_j^fine| / |c_j^fine|.
std::vector<double> coefficient_relative_error(const std::vector<double>& c_coarse,
                                               const std::vector<double>& c_fine);

// One table row. NaN marks an empty entry (level-0 relative errors,
// undefined rates); emitters render it blank.
struct ReportRow {
  int level = 0;
  double h = 0.0;
  long long dofs = 0;
  double e_u = NAN, rate_u = NAN;
  double e_xi = NAN, rate_xi = NAN;
  double e_bdry = NAN, rate_bdry = NAN;
  std::vector<double> c;      // harmonic coefficients, one per hole
  std::vector<double> rel_c;  // relative errors against the next level
  std::vector<double> rate_c;
};

struct ConvergenceReport {
  std::string name;
  int k = 1;
  bool relative = false;  // inter-level errors instead of exact ones
  int n_coeffs = 0;
  double expected_rate = NAN;  // regularity target pi/omega, reporting only
  std::vector<ReportRow> rows;

  void validate() const;  // h strictly decreasing, coefficient widths
};

// Fills rate columns: rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i)
// wherever two consecutive finite positive errors exist.
void compute_rates(ConvergenceReport& report);

std::string to_csv(const ConvergenceReport& report);
std::string to_markdown(const ConvergenceReport& report);

}  // namespace vemqc
