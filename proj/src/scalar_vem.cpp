// SPDX-License-Identifier: Apache-2.0
#include "vemqc/scalar_vem.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <fstream>

#include "equilibrate.hpp"
#include "vemqc/errors.hpp"

namespace vemqc {

VemSpace::VemSpace(const PolygonMesh& mesh, int k) : mesh_(mesh), k_(k) {
  if (k != 1 && k != 2) throw Error("VemSpace: order must be 1 or 2");
  const int nv = static_cast<int>(mesh_.vertices.size());
  const int nc = static_cast<int>(mesh_.cells.size());

  std::map<std::pair<int, int>, int> edge_ids;
  if (k == 2) {
    for (const auto& cell : mesh_.cells) {
      const int m = static_cast<int>(cell.size());
      for (int i = 0; i < m; ++i) {
        const int a = cell[i];
        const int b = cell[(i + 1) % m];
        edge_ids.emplace(std::make_pair(std::min(a, b), std::max(a, b)), 0);
      }
    }
    int next = 0;
    for (auto& [key, id] : edge_ids) {
      (void)key;
      id = next++;
    }
  }
  const int ne = static_cast<int>(edge_ids.size());
  n_dofs_ = (k == 1) ? nv : nv + ne + nc;

  elements_.reserve(nc);
  cell_dofs_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    elements_.push_back(build_element(mesh_.cell_polygon(c), k));
    auto& dofs = cell_dofs_[c];
    const auto& cell = mesh_.cells[c];
    const int m = static_cast<int>(cell.size());
    dofs.reserve(elements_[c].ndof);
    for (int v : cell) dofs.push_back(v);
    if (k == 2) {
      for (int i = 0; i < m; ++i) {
        const int a = cell[i];
        const int b = cell[(i + 1) % m];
        dofs.push_back(nv + edge_ids.at({std::min(a, b), std::max(a, b)}));
      }
      dofs.push_back(nv + ne + c);
    }
  }

  boundary_label_.assign(n_dofs_, -1);
  dof_node_.assign(n_dofs_, Point2{0, 0});
  for (int v = 0; v < nv; ++v) dof_node_[v] = mesh_.vertices[v];
  if (k == 2) {
    for (const auto& [key, id] : edge_ids)
      dof_node_[nv + id] = (mesh_.vertices[key.first] + mesh_.vertices[key.second]) * 0.5;
    for (int c = 0; c < nc; ++c) dof_node_[nv + ne + c] = elements_[c].centroid;
  }
  for (const auto& loop : mesh_.loops) {
    const int m = static_cast<int>(loop.vertices.size());
    for (int i = 0; i < m; ++i) {
      const int a = loop.vertices[i];
      const int b = loop.vertices[(i + 1) % m];
      boundary_label_[a] = loop.label;
      if (k == 2) {
        const auto it = edge_ids.find({std::min(a, b), std::max(a, b)});
        if (it == edge_ids.end()) throw TopologyError("VemSpace: boundary loop edge not in mesh");
        boundary_label_[nv + it->second] = loop.label;
      }
    }
  }
}

bool VemSpace::has_loop_label(int label) const {
  for (const auto& loop : mesh_.loops)
    if (loop.label == label) return true;
  return false;
}

int VemSpace::locate_cell(const Point2& p) const {
  const double tol = 1e-12 * std::max(1.0, mesh_.mesh_size());
  for (int c = 0; c < n_cells(); ++c)
    if (point_in_polygon(p, elements_[c].poly, tol)) return c;
  return -1;
}

Eigen::VectorXd SparseMatrix::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = A * x;
  if (border.size() > 0 && border_coeff != 0.0) y += border_coeff * border * (border.dot(x));
  return y;
}

void SparseMatrix::verify_symmetric(double tol) const {
  if (!symmetric) return;
  const Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(A.transpose()) - A;
  double scale = 0.0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (int j = 0; j < diff.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, j); it; ++it)
      if (std::abs(it.value()) > tol * std::max(1.0, scale))
        throw SolveError("matrix marked symmetric is not");
}

ScalarField make_field(std::shared_ptr<const VemSpace> space, Eigen::VectorXd dofs) {
  if (dofs.size() != space->n_dofs()) throw Error("make_field: dof vector size mismatch");
  ScalarField f;
  const int nc = space->n_cells();
  const int np = ScaledMonomialBasis::dimension(space->k());
  f.pi1.resize(np, nc);
  f.pi0.resize(np, nc);
  for (int c = 0; c < nc; ++c) {
    const auto& el = space->element(c);
    const auto& map = space->cell_dofs(c);
    Eigen::VectorXd local(el.ndof);
    for (int i = 0; i < el.ndof; ++i) local[i] = dofs[map[i]];
    f.pi1.col(c) = el.Pi1 * local;
    f.pi0.col(c) = el.Pi0 * local;
  }
  f.space = std::move(space);
  f.dofs = std::move(dofs);
  return f;
}

ScalarField interpolate(std::shared_ptr<const VemSpace> space, const ScalarFn& g) {
  Eigen::VectorXd dofs(space->n_dofs());
  const int nc = space->n_cells();
  for (int c = 0; c < nc; ++c) {
    const auto& el = space->element(c);
    const Eigen::VectorXd local = vemqc::interpolate(el, g);
    const auto& map = space->cell_dofs(c);
    for (int i = 0; i < el.ndof; ++i) dofs[map[i]] = local[i];
  }
  return make_field(std::move(space), std::move(dofs));
}

SparseMatrix assemble(const VemSpace& space, double c_stiff, double c_mass, double c_mean) {
  std::vector<Eigen::Triplet<double>> trips;
  size_t nnz = 0;
  for (int c = 0; c < space.n_cells(); ++c) nnz += static_cast<size_t>(space.element(c).ndof) * space.element(c).ndof;
  trips.reserve(nnz);
  for (int c = 0; c < space.n_cells(); ++c) {
    const auto& el = space.element(c);
    const auto& map = space.cell_dofs(c);
    Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(el.ndof, el.ndof);
    if (c_stiff != 0.0) loc += c_stiff * el.A;
    if (c_mass != 0.0) loc += c_mass * el.M0;
    for (int i = 0; i < el.ndof; ++i)
      for (int j = 0; j < el.ndof; ++j)
        if (loc(i, j) != 0.0) trips.emplace_back(map[i], map[j], loc(i, j));
  }
  SparseMatrix out;
  out.A.resize(space.n_dofs(), space.n_dofs());
  out.A.setFromTriplets(trips.begin(), trips.end());
  out.symmetric = true;
  if (c_mean != 0.0) {
    out.border = mean_vector(space);
    out.border_coeff = c_mean;
  }
  return out;
}

Eigen::VectorXd mean_vector(const VemSpace& space) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(space.n_dofs());
  for (int c = 0; c < space.n_cells(); ++c) {
    const auto& el = space.element(c);
    const auto& map = space.cell_dofs(c);
    for (int i = 0; i < el.ndof; ++i) m[map[i]] += el.mean_row[i];
  }
  return m;
}

Eigen::VectorXd assemble_load(const VemSpace& space, const LoadSpec& load) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.n_dofs());
  if (load.kind == LoadSpec::Kind::Zero) return b;
  if (load.kind == LoadSpec::Kind::ConstantOne) return mean_vector(space);
  if (load.kind == LoadSpec::Kind::L2Field && load.field->space->n_dofs() != space.n_dofs())
    throw Error("assemble_load: field lives on a different space");
  for (int c = 0; c < space.n_cells(); ++c) {
    const auto& el = space.element(c);
    const auto& map = space.cell_dofs(c);
    Eigen::VectorXd loc;
    switch (load.kind) {
      case LoadSpec::Kind::L2Fn:
        loc = local_load_l2(el, load.g);
        break;
      case LoadSpec::Kind::L2Field: {
        Eigen::VectorXd other(el.ndof);
        for (int i = 0; i < el.ndof; ++i) other[i] = load.field->dofs[map[i]];
        loc = el.M0 * other;
        break;
      }
      case LoadSpec::Kind::CurlFn:
        loc = local_load_curl(el, load.f);
        break;
      case LoadSpec::Kind::GradFn:
        loc = local_load_grad(el, load.f);
        break;
      default:
        throw Error("assemble_load: unhandled load kind");
    }
    for (int i = 0; i < el.ndof; ++i) b[map[i]] += loc[i];
  }
  return b;
}

namespace {

// Iterative refinement against the explicit matrix that was factored, with
// residuals accumulated in extended precision (the plain double matvec can
// saturate above what the factorization achieves when row scales are mixed).
// Ends with the gate every solve must pass: the normwise backward error
// ||b - Kx|| <= 1e-10 * || |K||x| + |b| ||. On well-scaled systems this is
// the plain relative residual; when cell-moment rows dominate |K||x| the
// plain ratio to ||b|| alone falls below what any double vector can attain,
// while this form stays meaningful and still rejects a broken factorization
// by several orders of magnitude.
template <typename Solver>
void refine_and_check(const Eigen::SparseMatrix<double>& K, const Solver& solver,
                      const Eigen::VectorXd& s, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
  detail::ResidualReport rep = detail::accurate_residual(K, x, b);
  double rn = rep.r.norm();
  for (int it = 0; it < 8 && rn > 1e-14 * rep.scale_norm; ++it) {
    const Eigen::VectorXd xn =
        x + (s.asDiagonal() * solver.solve((s.asDiagonal() * rep.r).eval()).eval()).eval();
    detail::ResidualReport next = detail::accurate_residual(K, xn, b);
    if (!(next.r.norm() < rn)) break;  // at the attainable floor
    x = xn;
    rep = std::move(next);
    rn = rep.r.norm();
  }
  if (!(rn <= 1e-10 * rep.scale_norm))
    throw SolveError("solve_sparse: residual " + std::to_string(rn / rep.scale_norm) +
                     " of backward-error scale exceeds 1e-10");
}

}  // namespace

Eigen::VectorXd solve_sparse(const SparseMatrix& M, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(M.A.rows());
  if (b.size() != n) throw SolveError("solve_sparse: rhs size mismatch");
  if (b.norm() == 0.0 && M.border.size() == 0) {
    // Still must fail loudly on singular systems when asked for a real solve.
    return Eigen::VectorXd::Zero(n);
  }
  // All branches solve a symmetrically equilibrated system and polish with a
  // few steps of iterative refinement; badly shaped cells and the area
  // scaling of cell-moment dofs otherwise degrade the direct solve.
  Eigen::VectorXd x;
  if (M.border.size() > 0) {
    // Bordered system [[A, m],[m^T, -1/c]] eliminates to A + c m m^T.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(M.A.nonZeros() + 2 * n + 1);
    for (int j = 0; j < M.A.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(M.A, j); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < n; ++i) {
      if (M.border[i] == 0.0) continue;
      trips.emplace_back(i, n, M.border[i]);
      trips.emplace_back(n, i, M.border[i]);
    }
    trips.emplace_back(n, n, -1.0 / M.border_coeff);
    Eigen::SparseMatrix<double> ext(n + 1, n + 1);
    ext.setFromTriplets(trips.begin(), trips.end());
    const Eigen::VectorXd s = detail::equilibration_scale(ext);
    const Eigen::SparseMatrix<double> scaled = s.asDiagonal() * ext * s.asDiagonal();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(scaled);
    if (lu.info() != Eigen::Success) throw SolveError("solve_sparse: bordered factorization failed");
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(n + 1);
    bx.head(n) = b;
    Eigen::VectorXd xe = s.asDiagonal() * lu.solve(s.asDiagonal() * bx).eval();
    refine_and_check(ext, lu, s, bx, xe);
    x = xe.head(n);
  } else if (M.symmetric) {
    const Eigen::VectorXd s = detail::equilibration_scale(M.A);
    const Eigen::SparseMatrix<double> scaled = s.asDiagonal() * M.A * s.asDiagonal();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(scaled);
    if (ldlt.info() != Eigen::Success)
      throw SolveError("solve_sparse: factorization failed (singular or indefinite)");
    x = s.asDiagonal() * ldlt.solve(s.asDiagonal() * b).eval();
    refine_and_check(M.A, ldlt, s, b, x);
  } else {
    const Eigen::VectorXd s = detail::equilibration_scale(M.A);
    const Eigen::SparseMatrix<double> scaled = s.asDiagonal() * M.A * s.asDiagonal();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(scaled);
    if (lu.info() != Eigen::Success) throw SolveError("solve_sparse: LU factorization failed");
    x = s.asDiagonal() * lu.solve(s.asDiagonal() * b).eval();
    refine_and_check(M.A, lu, s, b, x);
  }
  return x;
}

ScalarField solve_dirichlet(std::shared_ptr<const VemSpace> space, double beta,
                            const LoadSpec& load, const DirichletBC& bc) {
  for (const auto& [label, fn] : bc) {
    (void)fn;
    if (!space->has_loop_label(label))
      throw ConfigError("solve_dirichlet: loop label " + std::to_string(label) +
                        " not present in mesh");
  }
  const int n = space->n_dofs();
  Eigen::VectorXd constrained = Eigen::VectorXd::Zero(n);
  std::vector<int> reduced(n, -1);
  int n_free = 0;
  for (int d = 0; d < n; ++d) {
    const int label = space->boundary_label(d);
    if (label < 0) {
      reduced[d] = n_free++;
    } else {
      const auto it = bc.find(label);
      constrained[d] = (it == bc.end()) ? 0.0 : it->second(space->dof_node(d));
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b = assemble_load(*space, load);
  Eigen::VectorXd bf = Eigen::VectorXd::Zero(n_free);
  for (int d = 0; d < n; ++d)
    if (reduced[d] >= 0) bf[reduced[d]] = b[d];
  for (int c = 0; c < space->n_cells(); ++c) {
    const auto& el = space->element(c);
    const auto& map = space->cell_dofs(c);
    Eigen::MatrixXd loc = el.A;
    if (beta != 0.0) loc += beta * el.M0;
    for (int i = 0; i < el.ndof; ++i) {
      const int gi = map[i];
      if (reduced[gi] < 0) continue;
      for (int j = 0; j < el.ndof; ++j) {
        const int gj = map[j];
        if (reduced[gj] >= 0)
          trips.emplace_back(reduced[gi], reduced[gj], loc(i, j));
        else
          bf[reduced[gi]] -= loc(i, j) * constrained[gj];
      }
    }
  }
  SparseMatrix red;
  red.A.resize(n_free, n_free);
  red.A.setFromTriplets(trips.begin(), trips.end());
  red.symmetric = true;
  const Eigen::VectorXd xf = solve_sparse(red, bf);
  Eigen::VectorXd dofs = constrained;
  for (int d = 0; d < n; ++d)
    if (reduced[d] >= 0) dofs[d] = xf[reduced[d]];
  return make_field(std::move(space), std::move(dofs));
}

ScalarField solve_neumann_mean(std::shared_ptr<const VemSpace> space, const LoadSpec& load) {
  SparseMatrix A = assemble(*space, 1.0, 0.0, 1.0);
  const Eigen::VectorXd b = assemble_load(*space, load);
  Eigen::VectorXd dofs = solve_sparse(A, b);
  return make_field(std::move(space), std::move(dofs));
}

double global_mean(const ScalarField& field) {
  return mean_vector(*field.space).dot(field.dofs);
}

namespace {

int require_cell(const ScalarField& field, const Point2& p, int cell) {
  if (cell >= 0) return cell;
  const int c = field.space->locate_cell(p);
  if (c < 0) throw Error("field evaluation: point outside mesh");
  return c;
}

}  // namespace

double field_value(const ScalarField& field, Which which, const Point2& p, int cell) {
  const int c = require_cell(field, p, cell);
  const auto& el = field.space->element(c);
  const Eigen::VectorXd coeffs = (which == Which::Pi1) ? field.pi1.col(c) : field.pi0.col(c);
  return el.basis.eval_poly(coeffs, p);
}

Point2 field_gradient(const ScalarField& field, const Point2& p, int cell) {
  const int c = require_cell(field, p, cell);
  const auto& el = field.space->element(c);
  return el.basis.grad_poly(field.pi1.col(c), p);
}

Point2 field_curl(const ScalarField& field, const Point2& p, int cell) {
  const Point2 g = field_gradient(field, p, cell);
  return {g.y, -g.x};
}

void dump_matrix(const SparseMatrix& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("dump_matrix: cannot open " + path);
  char buf[96];
  for (int j = 0; j < M.A.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M.A, j); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf;
    }
}

}  // namespace vemqc
