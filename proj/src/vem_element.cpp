// SPDX-License-Identifier: Apache-2.0
#include "vemqc/vem_element.hpp"

#include "vemqc/errors.hpp"

namespace vemqc {

namespace {

// Lagrange shape values on an edge parametrized by s in [0,1]: endpoint
// values for k=1, endpoint + midpoint values for k=2. Order: (start, end)
// or (start, end, midpoint).
void edge_trace_shapes(int k, double s, double* out) {
  if (k == 1) {
    out[0] = 1.0 - s;
    out[1] = s;
  } else {
    out[0] = 2.0 * (s - 0.5) * (s - 1.0);
    out[1] = 2.0 * s * (s - 0.5);
    out[2] = 4.0 * s * (1.0 - s);
  }
}

}  // namespace

LocalElement build_element(const Polygon& poly, int k) {
  if (k != 1 && k != 2) throw Error("build_element: order must be 1 or 2");
  LocalElement el;
  el.k = k;
  el.poly = poly;
  el.nv = static_cast<int>(poly.size());
  if (el.nv < 3) throw Error("build_element: cell with fewer than 3 vertices");
  el.ndof = (k == 1) ? el.nv : 2 * el.nv + 1;
  el.area = signed_area(poly);
  if (el.area <= 0.0) throw Error("build_element: cell area must be positive");
  el.centroid = polygon_centroid(poly);
  el.diameter = polygon_diameter(poly);
  el.basis = ScaledMonomialBasis(el.centroid, el.diameter, k);
  el.moments = polygon_moments(poly, el.basis, 2 * k);

  el.nodes.reserve(el.num_boundary_nodes());
  for (const auto& p : poly) el.nodes.push_back(p);
  if (k == 2)
    for (int i = 0; i < el.nv; ++i)
      el.nodes.push_back((poly[i] + poly[(i + 1) % el.nv]) * 0.5);

  const int np = el.basis.dim();
  const int nb = el.num_boundary_nodes();

  // Dof matrix: D(i, alpha) = dof_i(m_alpha).
  Eigen::MatrixXd D(el.ndof, np);
  for (int i = 0; i < nb; ++i)
    for (int a = 0; a < np; ++a) D(i, a) = el.basis.eval(a, el.nodes[i]);
  if (k == 2)
    for (int a = 0; a < np; ++a) D(2 * el.nv, a) = el.moments[a];

  // B(alpha, i) = (grad m_alpha, grad psi_i)_D + (int_bnd m_alpha)(int_bnd psi_i),
  // with the gradient term integrated by parts.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(np, el.ndof);
  Eigen::VectorXd p0_mono = Eigen::VectorXd::Zero(np);        // int_bnd m_alpha
  Eigen::RowVectorXd p0_dof = Eigen::RowVectorXd::Zero(el.ndof);  // int_bnd psi_i

  const auto gl = gauss_legendre_01(k + 1);
  const int trace_n = k + 1;
  double shapes[3];
  for (int e = 0; e < el.nv; ++e) {
    const Point2 a = poly[e];
    const Point2 b = poly[(e + 1) % el.nv];
    const double len = dist(a, b);
    const Point2 nrm = Point2{(b - a).y, -(b - a).x} / len;
    int dofs_on_edge[3] = {e, (e + 1) % el.nv, el.nv + e};
    for (const auto& [s, w] : gl) {
      const Point2 x = a + (b - a) * s;
      edge_trace_shapes(k, s, shapes);
      for (int alpha = 0; alpha < np; ++alpha) {
        const double dn = dot(el.basis.grad(alpha, x), nrm);
        const double m = el.basis.eval(alpha, x);
        p0_mono[alpha] += w * len * m;
        for (int t = 0; t < trace_n; ++t) B(alpha, dofs_on_edge[t]) += w * len * shapes[t] * dn;
      }
      for (int t = 0; t < trace_n; ++t) p0_dof[dofs_on_edge[t]] += w * len * shapes[t];
    }
  }
  if (k == 2) {
    // -(psi_i, lap m_alpha)_D: the Laplacian of a degree-2 scaled monomial
    // is constant, so only the cell-moment dof contributes.
    for (int alpha = 0; alpha < np; ++alpha) {
      const double lap = el.basis.laplacian(alpha, el.centroid);
      if (lap != 0.0) B(alpha, 2 * el.nv) -= lap;
    }
  }
  // Normalize the mean constraint by the perimeter: the projector it pins
  // down is unchanged, but the unscaled form adds an O(h^2) rank-one block
  // to an O(1) Gram matrix and the solve degrades as the mesh refines.
  double perimeter = 0.0;
  for (int e = 0; e < el.nv; ++e) perimeter += dist(poly[e], poly[(e + 1) % el.nv]);
  p0_mono /= perimeter;
  p0_dof /= perimeter;
  B += p0_mono * p0_dof;

  // Gram matrix of the projection pairing on P_k.
  Eigen::MatrixXd Ghat = Eigen::MatrixXd::Zero(np, np);
  const double h2 = el.diameter * el.diameter;
  for (int a = 0; a < np; ++a) {
    const auto [ax, ay] = ScaledMonomialBasis::exponents(a);
    for (int b = 0; b < np; ++b) {
      const auto [bx, by] = ScaledMonomialBasis::exponents(b);
      double g = 0.0;
      if (ax > 0 && bx > 0) g += ax * bx / h2 * el.moments[ScaledMonomialBasis::index(ax + bx - 2, ay + by)];
      if (ay > 0 && by > 0) g += ay * by / h2 * el.moments[ScaledMonomialBasis::index(ax + bx, ay + by - 2)];
      Ghat(a, b) = g;
    }
  }
  const Eigen::MatrixXd G = Ghat + p0_mono * p0_mono.transpose();

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success)
    throw Error("build_element: singular projection system (degenerate cell)");
  el.Pi1 = ldlt.solve(B);
  if ((el.Pi1 * D - Eigen::MatrixXd::Identity(np, np)).cwiseAbs().maxCoeff() > 1e-8)
    throw Error("build_element: projector fails polynomial reproduction (degenerate cell)");

  el.Pi0 = el.Pi1;
  if (k == 2) {
    // Match the cell average: add the constant correction
    // [(v,1)_D - (Pi1 v,1)_D] / |D|.
    Eigen::RowVectorXd corr = -el.moments.head(np).transpose() * el.Pi1;
    corr[2 * el.nv] += 1.0;
    el.Pi0.row(0) += corr / el.area;
  }

  // Stabilized stiffness: consistency + nodal stabilization of (Id - Pi1).
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(nb, el.ndof);
  for (int p = 0; p < nb; ++p) {
    E(p, p) = 1.0;
    for (int a = 0; a < np; ++a) E.row(p) -= el.basis.eval(a, el.nodes[p]) * el.Pi1.row(a);
  }
  el.A = el.Pi1.transpose() * Ghat * el.Pi1 + E.transpose() * E;

  // Projected mass: H(a,b) = int_D m_a m_b = moment of m_{a+b}.
  Eigen::MatrixXd H(np, np);
  for (int a = 0; a < np; ++a) {
    const auto [ax, ay] = ScaledMonomialBasis::exponents(a);
    for (int b = 0; b < np; ++b) {
      const auto [bx, by] = ScaledMonomialBasis::exponents(b);
      H(a, b) = el.moments[ScaledMonomialBasis::index(ax + bx, ay + by)];
    }
  }
  el.M0 = el.Pi0.transpose() * H * el.Pi0;
  el.mean_row = el.moments.head(np).transpose() * el.Pi0;
  return el;
}

Eigen::VectorXd local_load_curl(const LocalElement& el, const VectorFn& f) {
  const int np = el.basis.dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(np);
  for (const auto& [x, w] : polygon_quadrature(el.poly, 2 * el.k + 4)) {
    const Point2 fx = f(x);
    for (int a = 0; a < np; ++a) {
      const Point2 g = el.basis.grad(a, x);
      acc[a] += w * (fx.x * g.y - fx.y * g.x);
    }
  }
  return el.Pi1.transpose() * acc;
}

Eigen::VectorXd local_load_grad(const LocalElement& el, const VectorFn& f) {
  const int np = el.basis.dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(np);
  for (const auto& [x, w] : polygon_quadrature(el.poly, 2 * el.k + 4)) {
    const Point2 fx = f(x);
    for (int a = 0; a < np; ++a) acc[a] += w * dot(fx, el.basis.grad(a, x));
  }
  return el.Pi1.transpose() * acc;
}

Eigen::VectorXd local_load_l2(const LocalElement& el, const ScalarFn& g) {
  const int np = el.basis.dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(np);
  for (const auto& [x, w] : polygon_quadrature(el.poly, 2 * el.k + 4)) {
    const double gx = g(x);
    for (int a = 0; a < np; ++a) acc[a] += w * gx * el.basis.eval(a, x);
  }
  return el.Pi0.transpose() * acc;
}

Eigen::VectorXd interpolate(const LocalElement& el, const ScalarFn& g) {
  Eigen::VectorXd dofs(el.ndof);
  const int nb = el.num_boundary_nodes();
  for (int i = 0; i < nb; ++i) dofs[i] = g(el.nodes[i]);
  if (el.k == 2) {
    double mom = 0.0;
    for (const auto& [x, w] : polygon_quadrature(el.poly, 2 * el.k + 4)) mom += w * g(x);
    dofs[2 * el.nv] = mom;
  }
  return dofs;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> curl_coeffs(const LocalElement& el,
                                                        const Eigen::VectorXd& p) {
  const int np = el.basis.dim();
  Eigen::VectorXd cx = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd cy = Eigen::VectorXd::Zero(np);
  for (int a = 0; a < np; ++a) {
    if (p[a] == 0.0) continue;
    cx += p[a] * el.basis.dy_coeffs(a);
    cy -= p[a] * el.basis.dx_coeffs(a);
  }
  return {cx, cy};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> grad_coeffs(const LocalElement& el,
                                                        const Eigen::VectorXd& p) {
  const int np = el.basis.dim();
  Eigen::VectorXd gx = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd gy = Eigen::VectorXd::Zero(np);
  for (int a = 0; a < np; ++a) {
    if (p[a] == 0.0) continue;
    gx += p[a] * el.basis.dx_coeffs(a);
    gy += p[a] * el.basis.dy_coeffs(a);
  }
  return {gx, gy};
}

}  // namespace vemqc
