// SPDX-License-Identifier: Apache-2.0
#include "vemqc/hodge.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <memory>

#include "equilibrate.hpp"
#include "vemqc/errors.hpp"

namespace vemqc {

namespace {

ScalarField combine_zero_mean(const ScalarField& f0, const ScalarField& f1, double ratio) {
  return make_field(f0.space, f0.dofs - ratio * f1.dofs);
}

double safe_mean_ratio(const ScalarField& xi0, const ScalarField& xi1) {
  const double m0 = global_mean(xi0);
  const double m1 = global_mean(xi1);
  if (m1 <= 0.0)
    throw SolveError("hodge: (1, xi_1) = " + std::to_string(m1) +
                     " is not positive; pipeline assumption violated");
  return m0 / m1;
}

}  // namespace

std::pair<ScalarField, ScalarField> solve_gamma0(const QuadCurlProblem& problem) {
  const auto& space = problem.space;
  if (space->mesh().num_inner_loops() > 0)
    throw ConfigError("hodge: gamma = 0 requires a simply connected domain");
  ScalarField rho = solve_neumann_mean(space, LoadSpec::curl(problem.f));
  ScalarField xi0 = solve_dirichlet(space, problem.beta, LoadSpec::l2(rho));
  ScalarField xi1 = solve_dirichlet(space, problem.beta, LoadSpec::one());
  ScalarField xi = combine_zero_mean(xi0, xi1, safe_mean_ratio(xi0, xi1));
  return {std::move(rho), std::move(xi)};
}

namespace {

// Monolithic gamma > 0 system over [zeta (all dofs); xi (interior dofs);
// lambda (mean border)]. The xi-block equations are negated so the matrix
// is symmetric indefinite; a pivot-free Cholesky-type factorization then
// fits in memory where a general sparse LU would not, and equilibration
// plus iterative refinement recover full accuracy. Returns the two fields
// for a given load pair.
struct BlockSystem {
  std::shared_ptr<const VemSpace> space;
  std::vector<int> reduced;  // dof -> xi index or -1
  int n = 0, nf = 0;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
  Eigen::SparseMatrix<double> mat;
  Eigen::VectorXd scale;

  BlockSystem(std::shared_ptr<const VemSpace> sp, double beta, double gamma) : space(std::move(sp)) {
    n = space->n_dofs();
    reduced.assign(n, -1);
    for (int d = 0; d < n; ++d)
      if (!space->is_boundary(d)) reduced[d] = nf++;

    const double sg = std::sqrt(gamma);
    const Eigen::VectorXd m = mean_vector(*space);
    {
      std::vector<Eigen::Triplet<double>> trips;
      for (int c = 0; c < space->n_cells(); ++c) {
        const auto& el = space->element(c);
        const auto& map = space->cell_dofs(c);
        for (int i = 0; i < el.ndof; ++i) {
          const int gi = map[i];
          const int ri = reduced[gi];
          for (int j = 0; j < el.ndof; ++j) {
            const int gj = map[j];
            const int rj = reduced[gj];
            trips.emplace_back(gi, gj, el.A(i, j));                      // a_h(zeta, psi)
            if (rj >= 0) trips.emplace_back(gi, n + rj, sg * el.M0(i, j));  // +g^1/2 (P0 psi, P0 xi)
            if (ri >= 0) {
              trips.emplace_back(n + ri, gj, sg * el.M0(i, j));          // g^1/2 (P0 zeta, P0 eta)
              if (rj >= 0)
                trips.emplace_back(n + ri, n + rj, -el.A(i, j) - beta * el.M0(i, j));
            }
          }
        }
      }
      for (int d = 0; d < n; ++d) {
        if (m[d] == 0.0) continue;
        trips.emplace_back(d, n + nf, m[d]);
        trips.emplace_back(n + nf, d, m[d]);
      }
      trips.emplace_back(n + nf, n + nf, -1.0);
      mat.resize(n + nf + 1, n + nf + 1);
      mat.setFromTriplets(trips.begin(), trips.end());
    }
    scale = detail::equilibration_scale(mat);
    ldlt = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    ldlt->compute(scaled());
    if (ldlt->info() != Eigen::Success) use_lu();
  }

  Eigen::SparseMatrix<double> scaled() const {
    return scale.asDiagonal() * mat * scale.asDiagonal();
  }

  // The pivot-free factorization can break down on this saddle-point
  // structure; release it first so both factors never coexist in memory.
  void use_lu() {
    ldlt.reset();
    lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu->compute(scaled());
    if (lu->info() != Eigen::Success)
      throw SolveError("hodge: block system factorization failed");
  }

  Eigen::VectorXd factor_solve(const Eigen::VectorXd& r) const {
    const Eigen::VectorXd rs = scale.asDiagonal() * r;
    if (lu) return scale.asDiagonal() * lu->solve(rs).eval();
    return scale.asDiagonal() * ldlt->solve(rs).eval();
  }

  // Iterative refinement with residuals accumulated in extended precision.
  // The gate is the normwise backward error ||b - Ax|| <= tol * || |A||x|+|b| ||:
  // the cell-moment dofs put rows of very different magnitude into one
  // system, so the raw ratio to ||b|| alone saturates at the double rounding
  // floor of the large rows and is unattainable on fine meshes, while the
  // backward-error form degrades gracefully and still rejects a broken
  // factorization by many orders of magnitude.
  bool refine(const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
    detail::ResidualReport rep = detail::accurate_residual(mat, x, b);
    double rn = rep.r.norm();
    for (int it = 0; it < 8 && rn > 1e-14 * rep.scale_norm; ++it) {
      const Eigen::VectorXd xn = x + factor_solve(rep.r);
      detail::ResidualReport next = detail::accurate_residual(mat, xn, b);
      const double rn_next = next.r.norm();
      if (!(rn_next < rn)) break;  // at the attainable floor
      x = xn;
      rep = std::move(next);
      rn = rn_next;
    }
    return rn <= 1e-10 * rep.scale_norm;
  }

  std::pair<ScalarField, ScalarField> solve(const Eigen::VectorXd& rhs_zeta,
                                            const Eigen::VectorXd& rhs_xi_full) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + nf + 1);
    b.head(n) = rhs_zeta;
    for (int d = 0; d < n; ++d)
      if (reduced[d] >= 0) b[n + reduced[d]] = -rhs_xi_full[d];
    Eigen::VectorXd x = factor_solve(b);
    if (!refine(b, x)) throw SolveError("hodge: block solve residual exceeds tolerance");
    Eigen::VectorXd xi_dofs = Eigen::VectorXd::Zero(n);
    for (int d = 0; d < n; ++d)
      if (reduced[d] >= 0) xi_dofs[d] = x[n + reduced[d]];
    return {make_field(space, x.head(n)), make_field(space, std::move(xi_dofs))};
  }
};

}  // namespace

std::pair<ScalarField, ScalarField> solve_gamma_pos(const QuadCurlProblem& problem) {
  if (!(problem.gamma > 0.0)) throw ConfigError("hodge: solve_gamma_pos requires gamma > 0");
  const auto& space = problem.space;
  BlockSystem sys(space, problem.beta, problem.gamma);

  const double isg = 1.0 / std::sqrt(problem.gamma);
  const Eigen::VectorXd f_curl = assemble_load(*space, LoadSpec::curl(problem.f));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(space->n_dofs());
  auto [zeta0, xi0] = sys.solve(isg * f_curl, zero);
  auto [zeta1, xi1] = sys.solve(zero, assemble_load(*space, LoadSpec::one()));

  const double ratio = safe_mean_ratio(xi0, xi1);
  return {combine_zero_mean(zeta0, zeta1, ratio), combine_zero_mean(xi0, xi1, ratio)};
}

ScalarField solve_phi(const ScalarField& xi_h) {
  return solve_neumann_mean(xi_h.space, LoadSpec::l2(xi_h));
}

std::vector<ScalarField> solve_harmonics(std::shared_ptr<const VemSpace> space) {
  const int m = space->mesh().num_inner_loops();
  std::vector<ScalarField> out;
  out.reserve(m);
  for (int j = 1; j <= m; ++j) {
    DirichletBC bc;
    bc[j] = [](const Point2&) { return 1.0; };
    out.push_back(solve_dirichlet(space, 0.0, LoadSpec::zero(), bc));
  }
  return out;
}

std::vector<double> solve_coefficients(const std::vector<ScalarField>& harmonics,
                                       const VectorFn& f, double gamma) {
  const int m = static_cast<int>(harmonics.size());
  if (m == 0) return {};
  if (!(gamma > 0.0)) throw ConfigError("hodge: coefficients require gamma > 0");
  const auto& space = harmonics[0].space;
  const SparseMatrix A = assemble(*space, 1.0, 0.0);
  const Eigen::VectorXd fg = assemble_load(*space, LoadSpec::grad(f));
  Eigen::MatrixXd C(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd Ai = A.A * harmonics[i].dofs;
    for (int j = 0; j < m; ++j) C(i, j) = Ai.dot(harmonics[j].dofs);
    rhs[i] = fg.dot(harmonics[i].dofs) / gamma;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (C + C.transpose()));
  if (llt.info() != Eigen::Success)
    throw SolveError("hodge: harmonic coefficient matrix is not positive definite");
  const Eigen::VectorXd c = llt.solve(rhs);
  return {c.data(), c.data() + m};
}

VectorPolyField reconstruct_u(const ScalarField& phi_h, const std::vector<ScalarField>& harmonics,
                              const std::vector<double>& coeffs) {
  if (harmonics.size() != coeffs.size())
    throw Error("reconstruct_u: harmonics/coefficients length mismatch");
  const auto& space = phi_h.space;
  VectorPolyField u;
  u.space = space;
  const int np = ScaledMonomialBasis::dimension(space->k());
  const int nc = space->n_cells();
  u.cx.setZero(np, nc);
  u.cy.setZero(np, nc);
  for (int c = 0; c < nc; ++c) {
    const auto& el = space->element(c);
    auto [cx, cy] = curl_coeffs(el, phi_h.pi1.col(c));
    for (size_t j = 0; j < harmonics.size(); ++j) {
      auto [gx, gy] = grad_coeffs(el, harmonics[j].pi1.col(c));
      cx += coeffs[j] * gx;
      cy += coeffs[j] * gy;
    }
    u.cx.col(c) = cx;
    u.cy.col(c) = cy;
  }
  return u;
}

HodgeSolution solve(const QuadCurlProblem& problem) {
  const int m = problem.space->mesh().num_inner_loops();
  if (problem.gamma == 0.0 && m >= 1)
    throw ConfigError("hodge: gamma = 0 on a domain with holes is not solvable by this pipeline");
  HodgeSolution sol;
  if (problem.gamma > 0.0) {
    auto [zeta, xi] = solve_gamma_pos(problem);
    sol.potential = std::move(zeta);
    sol.xi_h = std::move(xi);
  } else {
    auto [rho, xi] = solve_gamma0(problem);
    sol.potential = std::move(rho);
    sol.xi_h = std::move(xi);
  }
  sol.phi_h = solve_phi(sol.xi_h);
  if (m >= 1) {
    sol.harmonics = solve_harmonics(problem.space);
    sol.coeffs = solve_coefficients(sol.harmonics, problem.f, problem.gamma);
  }
  sol.u_h = reconstruct_u(sol.phi_h, sol.harmonics, sol.coeffs);
  return sol;
}

}  // namespace vemqc
