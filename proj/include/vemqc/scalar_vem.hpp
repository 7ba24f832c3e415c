// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <map>
#include <memory>

#include "vemqc/poly_mesh.hpp"
#include "vemqc/vem_element.hpp"

namespace vemqc {

// Global discrete space: mesh, order, per-cell element kernels, and the
// dof map. Dof ordering: vertices (mesh order), then edge midpoints (edges
// sorted by vertex-index pair), then cell moments (cell order).
class VemSpace {
 public:
  VemSpace(const PolygonMesh& mesh, int k);

  const PolygonMesh& mesh() const { return mesh_; }
  int k() const { return k_; }
  int n_dofs() const { return n_dofs_; }
  int n_cells() const { return static_cast<int>(elements_.size()); }
  const LocalElement& element(int c) const { return elements_[c]; }
  const std::vector<int>& cell_dofs(int c) const { return cell_dofs_[c]; }

  // Loop label of a boundary dof, -1 for interior dofs (cell moments are
  // always interior).
  int boundary_label(int dof) const { return boundary_label_[dof]; }
  bool is_boundary(int dof) const { return boundary_label_[dof] >= 0; }
  // Node position of a vertex/midpoint dof.
  const Point2& dof_node(int dof) const { return dof_node_[dof]; }
  bool has_loop_label(int label) const;

  int locate_cell(const Point2& p) const;  // -1 if outside

 private:
  PolygonMesh mesh_;
  int k_;
  int n_dofs_ = 0;
  std::vector<LocalElement> elements_;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<int> boundary_label_;
  std::vector<Point2> dof_node_;
};

// Sparse operator with an optional rank-one mean term kept in bordered
// form: apply(x) = A x + border_coeff * m (m^T x).
struct SparseMatrix {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd border;
  double border_coeff = 0.0;
  bool symmetric = false;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  void verify_symmetric(double tol = 1e-12) const;  // throws when flag set and violated
};

struct ScalarField {
  std::shared_ptr<const VemSpace> space;
  Eigen::VectorXd dofs;
  Eigen::MatrixXd pi1;  // dim P_k x n_cells, projected coefficients per cell
  Eigen::MatrixXd pi0;
};

ScalarField make_field(std::shared_ptr<const VemSpace> space, Eigen::VectorXd dofs);
ScalarField interpolate(std::shared_ptr<const VemSpace> space, const ScalarFn& g);

struct LoadSpec {
  enum class Kind { Zero, L2Fn, L2Field, ConstantOne, CurlFn, GradFn };
  Kind kind = Kind::Zero;
  ScalarFn g;
  VectorFn f;
  const ScalarField* field = nullptr;

  static LoadSpec zero() { return {}; }
  static LoadSpec l2(ScalarFn fn) { return {Kind::L2Fn, std::move(fn), nullptr, nullptr}; }
  static LoadSpec l2(const ScalarField& fld) { return {Kind::L2Field, nullptr, nullptr, &fld}; }
  static LoadSpec one() { return {Kind::ConstantOne, nullptr, nullptr, nullptr}; }
  static LoadSpec curl(VectorFn fn) { return {Kind::CurlFn, nullptr, std::move(fn), nullptr}; }
  static LoadSpec grad(VectorFn fn) { return {Kind::GradFn, nullptr, std::move(fn), nullptr}; }
};

// A = sum_cells scatter(c_stiff*A_loc + c_mass*M0_loc); c_mean adds the
// bordered rank-one mean term.
SparseMatrix assemble(const VemSpace& space, double c_stiff, double c_mass, double c_mean = 0.0);

// Assembled functional m with m^T v = (Pi0 v, 1)_Omega.
Eigen::VectorXd mean_vector(const VemSpace& space);

Eigen::VectorXd assemble_load(const VemSpace& space, const LoadSpec& load);

// Direct sparse solve with relative residual <= 1e-10 guaranteed (throws
// SolveError otherwise). Bordered systems are solved at size N+1.
Eigen::VectorXd solve_sparse(const SparseMatrix& A, const Eigen::VectorXd& b);

using DirichletBC = std::map<int, ScalarFn>;  // loop label -> boundary values

// a_h(u,v) + beta (Pi0 u, Pi0 v) = L(v) with all boundary dofs constrained;
// labels missing from `bc` get homogeneous values.
ScalarField solve_dirichlet(std::shared_ptr<const VemSpace> space, double beta,
                            const LoadSpec& load, const DirichletBC& bc = {});

// a_h(u,v) + (u,1)(v,1) = L(v) over the full space, solved bordered.
ScalarField solve_neumann_mean(std::shared_ptr<const VemSpace> space, const LoadSpec& load);

double global_mean(const ScalarField& field);

enum class Which { Pi1, Pi0 };
double field_value(const ScalarField& field, Which which, const Point2& p, int cell = -1);
Point2 field_gradient(const ScalarField& field, const Point2& p, int cell = -1);
Point2 field_curl(const ScalarField& field, const Point2& p, int cell = -1);

// Coordinate-format text dump `i j value`, 0-based, one entry per line.
void dump_matrix(const SparseMatrix& A, const std::string& path);

}  // namespace vemqc
