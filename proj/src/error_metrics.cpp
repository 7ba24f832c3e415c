// SPDX-License-Identifier: Apache-2.0
#include "vemqc/error_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "vemqc/errors.hpp"

namespace vemqc {

namespace {

int error_degree(const VemSpace& space) { return 2 * space.k() + 4; }

struct BoundaryEdge {
  int cell;
  Point2 a, b;
  Point2 normal;  // unit outward
};

std::vector<BoundaryEdge> boundary_edges(const VemSpace& space) {
  const auto& mesh = space.mesh();
  std::map<std::pair<int, int>, int> use;
  for (const auto& cell : mesh.cells) {
    const int nv = static_cast<int>(cell.size());
    for (int i = 0; i < nv; ++i) {
      const int a = cell[i], b = cell[(i + 1) % nv];
      ++use[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<BoundaryEdge> out;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto& cell = mesh.cells[c];
    const int nv = static_cast<int>(cell.size());
    for (int i = 0; i < nv; ++i) {
      const int a = cell[i], b = cell[(i + 1) % nv];
      if (use[{std::min(a, b), std::max(a, b)}] != 1) continue;
      const Point2 pa = mesh.vertices[a], pb = mesh.vertices[b];
      const Point2 d = pb - pa;
      const double len = norm(d);
      out.push_back({c, pa, pb, Point2{d.y / len, -d.x / len}});
    }
  }
  return out;
}

double cross_n(const Point2& n, const Point2& u) { return n.x * u.y - n.y * u.x; }

}  // namespace

double l2_error_u(const VectorPolyField& u_h, const VectorFn& u_exact) {
  const auto& space = *u_h.space;
  double sum = 0.0;
  for (int c = 0; c < space.n_cells(); ++c) {
    const auto rule = polygon_quadrature(space.element(c).poly, error_degree(space));
    for (const auto& qp : rule) {
      const Point2 diff = u_exact(qp.x) - u_h.eval(c, qp.x);
      sum += qp.w * dot(diff, diff);
    }
  }
  return std::sqrt(sum);
}

double h1_broken_error_xi(const ScalarField& xi_h, const VectorFn& grad_xi_exact) {
  const auto& space = *xi_h.space;
  double sum = 0.0;
  for (int c = 0; c < space.n_cells(); ++c) {
    const auto& el = space.element(c);
    const auto rule = polygon_quadrature(el.poly, error_degree(space));
    for (const auto& qp : rule) {
      const Point2 diff = grad_xi_exact(qp.x) - el.basis.grad_poly(xi_h.pi1.col(c), qp.x);
      sum += qp.w * dot(diff, diff);
    }
  }
  return std::sqrt(sum);
}

BoundaryTangentialError boundary_tangential_error(const VectorPolyField& u_h) {
  const auto& space = *u_h.space;
  BoundaryTangentialError err;
  double sum = 0.0;
  for (const auto& edge : boundary_edges(space)) {
    for (const auto& qp : edge_quadrature(edge.a, edge.b, 2 * space.k()))
      sum += qp.w * std::pow(cross_n(edge.normal, u_h.eval(edge.cell, qp.x)), 2);
    std::vector<Point2> nodes = {edge.a, edge.b};
    if (space.k() == 2) nodes.push_back(0.5 * (edge.a + edge.b));
    for (const auto& p : nodes)
      err.max_nodal =
          std::max(err.max_nodal, std::abs(cross_n(edge.normal, u_h.eval(edge.cell, p))));
  }
  err.l2 = std::sqrt(sum);
  return err;
}

namespace {

const std::vector<int>& parent_links(const VemSpace& coarse, const VemSpace& fine) {
  const auto& links = fine.mesh().parent_of_cell;
  if (static_cast<int>(links.size()) != fine.n_cells())
    throw Error("inter-level error: fine mesh carries no parent links");
  for (int p : links)
    if (p < 0 || p >= coarse.n_cells())
      throw Error("inter-level error: parent link out of range of the coarse mesh");
  return links;
}

double relative_from_sums(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    throw Error("inter-level error: fine field has zero norm");
  }
  return std::sqrt(num / den);
}

}  // namespace

double inter_level_relative_u(const VectorPolyField& u_coarse, const VectorPolyField& u_fine) {
  const auto& fine = *u_fine.space;
  const auto& links = parent_links(*u_coarse.space, fine);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < fine.n_cells(); ++c) {
    const auto rule = polygon_quadrature(fine.element(c).poly, error_degree(fine));
    for (const auto& qp : rule) {
      const Point2 uf = u_fine.eval(c, qp.x);
      const Point2 diff = u_coarse.eval(links[c], qp.x) - uf;
      num += qp.w * dot(diff, diff);
      den += qp.w * dot(uf, uf);
    }
  }
  return relative_from_sums(num, den);
}

double inter_level_relative_xi(const ScalarField& xi_coarse, const ScalarField& xi_fine) {
  const auto& fine = *xi_fine.space;
  const auto& coarse = *xi_coarse.space;
  const auto& links = parent_links(coarse, fine);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < fine.n_cells(); ++c) {
    const auto& el = fine.element(c);
    const auto& pel = coarse.element(links[c]);
    const auto rule = polygon_quadrature(el.poly, error_degree(fine));
    for (const auto& qp : rule) {
      const Point2 gf = el.basis.grad_poly(xi_fine.pi1.col(c), qp.x);
      const Point2 diff = pel.basis.grad_poly(xi_coarse.pi1.col(links[c]), qp.x) - gf;
      num += qp.w * dot(diff, diff);
      den += qp.w * dot(gf, gf);
    }
  }
  return relative_from_sums(num, den);
}

std::vector<double> coefficient_relative_error(const std::vector<double>& c_coarse,
                                               const std::vector<double>& c_fine) {
  if (c_coarse.size() != c_fine.size())
    throw Error("coefficient error: coefficient count differs between levels");
  std::vector<double> out(c_fine.size());
  for (size_t j = 0; j < c_fine.size(); ++j) {
    if (std::abs(c_fine[j]) < 1e-14)
      throw Error("coefficient error: fine-level coefficient is numerically zero");
    out[j] = std::abs(c_coarse[j] - c_fine[j]) / std::abs(c_fine[j]);
  }
  return out;
}

void ConvergenceReport::validate() const {
  for (size_t r = 1; r < rows.size(); ++r)
    if (!(rows[r].h < rows[r - 1].h))
      throw Error("convergence report: mesh sizes must strictly decrease across rows");
  for (const auto& row : rows)
    if (static_cast<int>(row.c.size()) > n_coeffs || static_cast<int>(row.rel_c.size()) > n_coeffs)
      throw Error("convergence report: coefficient column width mismatch");
}

namespace {

double rate_of(double e_prev, double e_cur, double h_prev, double h_cur) {
  if (!std::isfinite(e_prev) || !std::isfinite(e_cur) || e_prev <= 0.0 || e_cur <= 0.0)
    return NAN;
  return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

}  // namespace

void compute_rates(ConvergenceReport& report) {
  auto& rows = report.rows;
  for (size_t r = 1; r < rows.size(); ++r) {
    const double hp = rows[r - 1].h, hc = rows[r].h;
    rows[r].rate_u = rate_of(rows[r - 1].e_u, rows[r].e_u, hp, hc);
    rows[r].rate_xi = rate_of(rows[r - 1].e_xi, rows[r].e_xi, hp, hc);
    rows[r].rate_bdry = rate_of(rows[r - 1].e_bdry, rows[r].e_bdry, hp, hc);
    rows[r].rate_c.assign(rows[r].rel_c.size(), NAN);
    for (size_t j = 0; j < rows[r].rel_c.size(); ++j)
      if (j < rows[r - 1].rel_c.size())
        rows[r].rate_c[j] = rate_of(rows[r - 1].rel_c[j], rows[r].rel_c[j], hp, hc);
  }
}

namespace {

std::string sci(double x) {
  if (!std::isfinite(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", x);
  return buf;
}

std::string md_num(double x) { return std::isfinite(x) ? sci(x) : "-"; }

std::string md_rate(double x) {
  if (!std::isfinite(x)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

}  // namespace

std::string to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "level,h,dofs,e_u,rate_u,e_xi,rate_xi,e_bdry,rate_bdry";
  for (int j = 1; j <= report.n_coeffs; ++j)
    os << ",c" << j << ",rel_c" << j << ",rate_c" << j;
  os << "\n";
  for (const auto& row : report.rows) {
    os << row.level << "," << sci(row.h) << "," << row.dofs << "," << sci(row.e_u) << ","
       << sci(row.rate_u) << "," << sci(row.e_xi) << "," << sci(row.rate_xi) << ","
       << sci(row.e_bdry) << "," << sci(row.rate_bdry);
    for (int j = 0; j < report.n_coeffs; ++j) {
      const auto at = [&](const std::vector<double>& v) {
        return j < static_cast<int>(v.size()) ? v[j] : NAN;
      };
      os << "," << sci(at(row.c)) << "," << sci(at(row.rel_c)) << "," << sci(at(row.rate_c));
    }
    os << "\n";
  }
  return os.str();
}

std::string to_markdown(const ConvergenceReport& report) {
  const std::string eu = report.relative ? "rel e_u" : "e_u";
  const std::string exi = report.relative ? "rel e_xi" : "e_xi";
  std::ostringstream os;
  os << "## " << report.name << " (k = " << report.k << ")\n\n";
  os << "| h | dofs | " << eu << " | rate | " << exi << " | rate | e_bdry | rate |";
  for (int j = 1; j <= report.n_coeffs; ++j)
    os << " c" << j << " | rel e_c" << j << " | rate |";
  os << "\n|";
  for (int col = 0; col < 8 + 3 * report.n_coeffs; ++col) os << "---|";
  os << "\n";
  for (const auto& row : report.rows) {
    os << "| " << md_num(row.h) << " | " << row.dofs << " | " << md_num(row.e_u) << " | "
       << md_rate(row.rate_u) << " | " << md_num(row.e_xi) << " | " << md_rate(row.rate_xi)
       << " | " << md_num(row.e_bdry) << " | " << md_rate(row.rate_bdry) << " |";
    for (int j = 0; j < report.n_coeffs; ++j) {
      const auto at = [&](const std::vector<double>& v) {
        return j < static_cast<int>(v.size()) ? v[j] : NAN;
      };
      os << " " << md_num(at(row.c)) << " | " << md_num(at(row.rel_c)) << " | "
         << md_rate(at(row.rate_c)) << " |";
    }
    os << "\n";
  }
  if (std::isfinite(report.expected_rate))
    os << "\nRegularity-limited target rate: min(" << md_rate(report.expected_rate) << ", k)\n";
  return os.str();
}

}  // namespace vemqc
