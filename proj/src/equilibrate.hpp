// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <vector>

namespace vemqc::detail {

// Symmetric diagonal equilibration. Dof scales in one system can differ by
// several orders of magnitude (cell-moment dofs carry an area factor), which
// inflates the condition number artificially. Solving (S K S) y = S b and
// returning x = S y gives the same solution with scale-independent pivoting.
inline Eigen::VectorXd equilibration_scale(const Eigen::SparseMatrix<double>& K) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(K.rows());
  for (int j = 0; j < K.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, j); it; ++it) {
      const double a = std::abs(it.value());
      m[it.row()] = std::max(m[it.row()], a);
      m[it.col()] = std::max(m[it.col()], a);
    }
  Eigen::VectorXd s(K.rows());
  for (int i = 0; i < K.rows(); ++i) s[i] = m[i] > 0.0 ? 1.0 / std::sqrt(m[i]) : 1.0;
  return s;
}

// Residual b - K x accumulated in extended precision, together with the
// norm of |K||x| + |b|. Double-precision matvecs hit a noise floor of about
// eps * || |K||x| ||, which for mixed-scale rows can sit above the residual
// the factorization actually achieves; measuring in extended precision
// separates "solver stagnated" from "measurement saturated". The scale norm
// is the natural yardstick for a normwise backward-error gate.
struct ResidualReport {
  Eigen::VectorXd r;
  double scale_norm = 0.0;
};

inline ResidualReport accurate_residual(const Eigen::SparseMatrix<double>& K,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(K.rows());
  std::vector<long double> acc(n), mag(n);
  for (int i = 0; i < n; ++i) {
    acc[i] = b[i];
    mag[i] = std::abs(static_cast<long double>(b[i]));
  }
  for (int j = 0; j < K.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, j); it; ++it) {
      const long double t =
          static_cast<long double>(it.value()) * static_cast<long double>(x[it.col()]);
      acc[it.row()] -= t;
      mag[it.row()] += t < 0.0L ? -t : t;
    }
  ResidualReport rep;
  rep.r.resize(n);
  long double sq = 0.0L;
  for (int i = 0; i < n; ++i) {
    rep.r[i] = static_cast<double>(acc[i]);
    sq += mag[i] * mag[i];
  }
  rep.scale_norm = static_cast<double>(sqrtl(sq));
  return rep;
}

}  // namespace vemqc::detail
