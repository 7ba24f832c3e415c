// SPDX-License-Identifier: Apache-2.0
// Self-contained reference implementations used to cross-check the library:
// a frozen Gauss-Legendre table, signed-fan polygon quadrature built on a
// Duffy-collapsed triangle rule, an independent scaled-monomial evaluator,
// a dense projector oracle, and a sine-mode expansion of the manufactured
// solution. Nothing here calls into the code under test except through
// plain geometry types.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "vemqc/geometry.hpp"

namespace oracle {

using vemqc::Point2;
using vemqc::Polygon;

// 16-point Gauss-Legendre nodes/weights on [-1,1], positive half (frozen
// literature values; the quadrature suite re-validates them by moment
// checks before any other suite relies on them).
inline constexpr int kGL = 16;
inline constexpr double kGLNode[8] = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
    0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
    0.94457502307323258, 0.98940093499164993,
};
inline constexpr double kGLWeight[8] = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
    0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
    0.06225352393864789, 0.02715245941175409,
};

// Nodes t_i and weights w_i on [0,1], sum w = 1.
inline void gl01(double t[kGL], double w[kGL]) {
  for (int i = 0; i < 8; ++i) {
    t[i] = 0.5 * (1.0 - kGLNode[i]);
    t[15 - i] = 0.5 * (1.0 + kGLNode[i]);
    w[i] = w[15 - i] = 0.5 * kGLWeight[i];
  }
}

// Integral of f along the segment [a,b] with arc-length weighting.
template <class F>
double edge_integrate(const Point2& a, const Point2& b, F&& f) {
  double t[kGL], w[kGL];
  gl01(t, w);
  const double len = vemqc::dist(a, b);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i) s += w[i] * f(a + (b - a) * t[i]);
  return s * len;
}

// Signed integral over the triangle (A,B,C) by the Duffy map of a tensor
// Gauss rule; exact for bivariate polynomials far beyond degree 20.
template <class F>
double tri_integrate(const Point2& A, const Point2& B, const Point2& C, F&& f) {
  double t[kGL], w[kGL];
  gl01(t, w);
  const double twice_area = vemqc::cross(B - A, C - A);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i) {
    const double u = t[i];
    for (int j = 0; j < kGL; ++j) {
      const Point2 p = A + (B - A) * u + (C - B) * (u * t[j]);
      s += w[i] * w[j] * u * f(p);
    }
  }
  return s * twice_area;
}

// Integral over a simple CCW polygon: signed fan from the first vertex.
template <class F>
double fan_integrate(const Polygon& poly, F&& f) {
  double s = 0.0;
  for (size_t i = 1; i + 1 < poly.size(); ++i)
    s += tri_integrate(poly[0], poly[i], poly[i + 1], f);
  return s;
}

inline double shoelace_area(const Polygon& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

inline Point2 shoelace_centroid(const Polygon& poly) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    const double c = p.x * q.y - q.x * p.y;
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

inline double max_pair_dist(const Polygon& poly) {
  double d = 0.0;
  for (size_t i = 0; i < poly.size(); ++i)
    for (size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, vemqc::dist(poly[i], poly[j]));
  return d;
}

// Scaled monomials ((x-c)/h)^ax ((y-c)/h)^ay in graded lexicographic order
// (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),... implemented from scratch.
struct Mono {
  Point2 c;
  double h;

  static void exps(int alpha, int& ax, int& ay) {
    int d = 0;
    while ((d + 1) * (d + 2) / 2 <= alpha) ++d;
    ay = alpha - d * (d + 1) / 2;
    ax = d - ay;
  }
  static int dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

  double eval(int alpha, const Point2& p) const {
    int ax, ay;
    exps(alpha, ax, ay);
    return std::pow((p.x - c.x) / h, ax) * std::pow((p.y - c.y) / h, ay);
  }
  Point2 grad(int alpha, const Point2& p) const {
    int ax, ay;
    exps(alpha, ax, ay);
    const double X = (p.x - c.x) / h, Y = (p.y - c.y) / h;
    const double gx = ax == 0 ? 0.0 : ax * std::pow(X, ax - 1) * std::pow(Y, ay) / h;
    const double gy = ay == 0 ? 0.0 : ay * std::pow(X, ax) * std::pow(Y, ay - 1) / h;
    return {gx, gy};
  }
  double laplacian(int alpha, const Point2& p) const {
    int ax, ay;
    exps(alpha, ax, ay);
    const double X = (p.x - c.x) / h, Y = (p.y - c.y) / h;
    double s = 0.0;
    if (ax >= 2) s += ax * (ax - 1) * std::pow(X, ax - 2) * std::pow(Y, ay);
    if (ay >= 2) s += ay * (ay - 1) * std::pow(X, ax) * std::pow(Y, ay - 2);
    return s / (h * h);
  }
};

// Dense brute-force projectors on one cell. Rebuilds, by not-the-library
// means, the Gram matrix of (grad p, grad q)_D + (bnd avg p)(bnd avg q),
// the dof right-hand sides via integration by parts, and the constant
// L2 correction; dof order: vertices, midpoints (k=2), cell moment (k=2).
struct ProjOracle {
  Eigen::MatrixXd Pi1, Pi0;
  Point2 center;
  double h = 0.0;
  double area = 0.0;
};

inline ProjOracle dense_projector_oracle(const Polygon& poly, int k) {
  const int nv = static_cast<int>(poly.size());
  const int dim = Mono::dim(k);
  const int ndof = k == 1 ? nv : 2 * nv + 1;
  ProjOracle out;
  out.center = shoelace_centroid(poly);
  out.h = max_pair_dist(poly);
  out.area = shoelace_area(poly);
  const Mono mono{out.center, out.h};

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd bnd_avg = Eigen::VectorXd::Zero(dim);  // boundary integrals of m_a
  for (int a = 0; a < dim; ++a) {
    for (int e = 0; e < nv; ++e)
      bnd_avg[a] += edge_integrate(poly[e], poly[(e + 1) % nv],
                                   [&](const Point2& p) { return mono.eval(a, p); });
    for (int b = 0; b <= a; ++b) {
      const double g = fan_integrate(poly, [&](const Point2& p) {
        return vemqc::dot(mono.grad(a, p), mono.grad(b, p));
      });
      G(a, b) = G(b, a) = g;
    }
  }
  G += bnd_avg * bnd_avg.transpose();

  // Right-hand sides: (grad v, grad m_a) = -(v, lap m_a) + bnd(v dm_a/dn),
  // plus bnd_avg(m_a) * bnd_avg(v); traces are edgewise Lagrange in the
  // nodal dofs, the volume term hits only the cell-moment dof.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, ndof);
  Eigen::RowVectorXd bnd_v = Eigen::RowVectorXd::Zero(ndof);  // boundary integral per dof
  double t[kGL], w[kGL];
  gl01(t, w);
  for (int e = 0; e < nv; ++e) {
    const Point2& p0 = poly[e];
    const Point2& p1 = poly[(e + 1) % nv];
    const double len = vemqc::dist(p0, p1);
    const Point2 tangent = (p1 - p0) / len;
    const Point2 n{tangent.y, -tangent.x};  // outward for CCW
    for (int q = 0; q < kGL; ++q) {
      const double s = t[q];
      const Point2 p = p0 + (p1 - p0) * s;
      double lag[3];
      int dofs[3];
      int nl;
      if (k == 1) {
        lag[0] = 1.0 - s;
        lag[1] = s;
        dofs[0] = e;
        dofs[1] = (e + 1) % nv;
        nl = 2;
      } else {
        lag[0] = (1.0 - s) * (1.0 - 2.0 * s);
        lag[1] = s * (2.0 * s - 1.0);
        lag[2] = 4.0 * s * (1.0 - s);
        dofs[0] = e;
        dofs[1] = (e + 1) % nv;
        dofs[2] = nv + e;
        nl = 3;
      }
      for (int l = 0; l < nl; ++l) bnd_v(dofs[l]) += w[q] * len * lag[l];
      for (int a = 0; a < dim; ++a) {
        const double dmdn = vemqc::dot(mono.grad(a, p), n);
        for (int l = 0; l < nl; ++l) B(a, dofs[l]) += w[q] * len * lag[l] * dmdn;
      }
    }
  }
  B += bnd_avg * bnd_v;
  if (k == 2) {
    for (int a = 0; a < dim; ++a) {
      // laplacian of a degree<=2 scaled monomial is constant
      B(a, 2 * nv) -= mono.laplacian(a, out.center);
    }
  }
  out.Pi1 = G.fullPivLu().solve(B);

  out.Pi0 = out.Pi1;
  if (k == 2) {
    Eigen::VectorXd mom(dim);  // integrals of the monomials
    for (int a = 0; a < dim; ++a)
      mom[a] = fan_integrate(poly, [&](const Point2& p) { return mono.eval(a, p); });
    Eigen::RowVectorXd pi1_mean = mom.transpose() * out.Pi1;  // (Pi1 v, 1)_D per dof
    Eigen::RowVectorXd raw = Eigen::RowVectorXd::Zero(ndof);  // (v, 1)_D per dof
    raw(2 * nv) = 1.0;
    out.Pi0.row(0) += (raw - pi1_mean) / out.area;
  }
  return out;
}

// Manufactured solution rebuilt through the identity
// sin^3 t = (3 sin t - sin 3t) / 4: everything becomes a four-term sum of
// separated sine/cosine modes with frequencies in {pi, 3pi}, so stream
// function, velocity, vorticity and load follow by per-mode calculus.
namespace modes {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kFreq[2] = {1, 3};
inline constexpr double kWeight[2] = {0.75, -0.25};

template <class F>
double sum(const Point2& p, F&& term) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      s += kWeight[i] * kWeight[j] * term(kFreq[i] * kPi, kFreq[j] * kPi, p);
  return s;
}

inline double phi(const Point2& p) {
  return sum(p, [](double a, double b, const Point2& q) {
    return std::sin(a * q.x) * std::sin(b * q.y);
  });
}
inline Point2 u(const Point2& p) {
  return {sum(p, [](double a, double b, const Point2& q) {
            return b * std::sin(a * q.x) * std::cos(b * q.y);
          }),
          sum(p, [](double a, double b, const Point2& q) {
            return -a * std::cos(a * q.x) * std::sin(b * q.y);
          })};
}
inline double xi(const Point2& p) {
  return sum(p, [](double a, double b, const Point2& q) {
    return (a * a + b * b) * std::sin(a * q.x) * std::sin(b * q.y);
  });
}
inline Point2 grad_xi(const Point2& p) {
  return {sum(p, [](double a, double b, const Point2& q) {
            return (a * a + b * b) * a * std::cos(a * q.x) * std::sin(b * q.y);
          }),
          sum(p, [](double a, double b, const Point2& q) {
            return (a * a + b * b) * b * std::sin(a * q.x) * std::cos(b * q.y);
          })};
}
inline Point2 f(const Point2& p) {
  const auto biharm = [](double a, double b) {
    const double l = a * a + b * b;
    return l * l;
  };
  return {sum(p, [&](double a, double b, const Point2& q) {
            return biharm(a, b) * b * std::sin(a * q.x) * std::cos(b * q.y);
          }),
          sum(p, [&](double a, double b, const Point2& q) {
            return -biharm(a, b) * a * std::cos(a * q.x) * std::sin(b * q.y);
          })};
}

}  // namespace modes

// Star-shaped test polygon: jittered angles around a circle with varying
// radii. Simple and CCW by construction; not necessarily convex.
inline Polygon random_polygon(std::mt19937_64& rng, int nv, const Point2& center = {0.3, -0.2},
                              double scale = 0.8) {
  std::uniform_real_distribution<double> jitter(0.1, 0.9);
  std::uniform_real_distribution<double> radial(0.45, 1.0);
  Polygon poly(nv);
  for (int i = 0; i < nv; ++i) {
    const double ang = 2.0 * modes::kPi * (i + jitter(rng)) / nv;
    const double r = scale * radial(rng);
    poly[i] = {center.x + r * std::cos(ang), center.y + r * std::sin(ang)};
  }
  return poly;
}

inline double rel_diff(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

}  // namespace oracle
