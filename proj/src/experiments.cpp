// SPDX-License-Identifier: Apache-2.0
#include "vemqc/experiments.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vemqc/errors.hpp"
#include "vemqc/voronoi.hpp"

namespace vemqc {

namespace manufactured {

namespace {
constexpr double pi = 3.14159265358979323846;
}

ScalarFn phi() {
  return [](const Point2& p) {
    return std::pow(std::sin(pi * p.x), 3) * std::pow(std::sin(pi * p.y), 3);
  };
}

VectorFn u() {
  return [](const Point2& p) -> Point2 {
    const double sx = std::sin(pi * p.x), cx = std::cos(pi * p.x);
    const double sy = std::sin(pi * p.y), cy = std::cos(pi * p.y);
    return {3 * pi * cy * sx * sx * sx * sy * sy, -3 * pi * cx * sx * sx * sy * sy * sy};
  };
}

ScalarFn xi() {
  return [](const Point2& p) {
    const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
    const double sx3 = sx * sx * sx, sy3 = sy * sy * sy;
    return pi * pi * (18 * sx3 * sy3 - 6 * sx3 * sy - 6 * sx * sy3);
  };
}

VectorFn grad_xi() {
  return [](const Point2& p) -> Point2 {
    const double sx = std::sin(pi * p.x), cx = std::cos(pi * p.x);
    const double sy = std::sin(pi * p.y), cy = std::cos(pi * p.y);
    const double p3 = pi * pi * pi;
    return {p3 * cx * (54 * sx * sx * sy * sy * sy - 18 * sx * sx * sy - 6 * sy * sy * sy),
            p3 * cy * (54 * sx * sx * sx * sy * sy - 6 * sx * sx * sx - 18 * sx * sy * sy)};
  };
}

VectorFn rhs() {
  return [](const Point2& p) -> Point2 {
    const double sx = std::sin(pi * p.x), cx = std::cos(pi * p.x);
    const double sy = std::sin(pi * p.y), cy = std::cos(pi * p.y);
    const double p5 = pi * pi * pi * pi * pi;
    const double f1 = p5 * cy *
                      (972 * sx * sx * sx * sy * sy - 168 * sx * sx * sx -
                       504 * sx * sy * sy + 72 * sx);
    const double f2 = -p5 * cx *
                      (972 * sx * sx * sy * sy * sy - 504 * sx * sx * sy -
                       168 * sy * sy * sy + 72 * sy);
    return {f1, f2};
  };
}

}  // namespace manufactured

VectorFn piecewise_constant_rhs() {
  return [](const Point2& p) -> Point2 {
    const double r = norm(p);
    if (r < 1.0 / std::sqrt(2.0)) return {0.25, 1.25};
    if (r < 1.0) return {0.5, 1.5};
    return {1.0, 2.0};
  };
}

VectorFn smooth_rhs() {
  return [](const Point2& p) -> Point2 {
    const double x = p.x, y = p.y;
    return {(x * x + 1) * std::sin(x) + x * y * y * y + 2,
            (y * y + 1) * std::cos(x) + x * x * x * y * y - 1};
  };
}

VectorFn rhs_by_name(const std::string& name) {
  if (name == "exp1") return manufactured::rhs();
  if (name == "piecewise") return piecewise_constant_rhs();
  if (name == "smooth") return smooth_rhs();
  throw ConfigError("unknown rhs: " + name);
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.output = name + ".csv";
  if (name == "exp1") {
    c.rhs = "exp1";
    c.mesh.kind = MeshSpec::Kind::Structured;
    c.expected_rate = 2.0;
    c.mesh.seed = 1;
  } else if (name == "exp2") {
    c.rhs = "piecewise";
    c.mesh.kind = MeshSpec::Kind::Nested;
    c.mesh.n_seeds = 25;
    c.mesh.seed = 2;
    c.expected_rate = 2.0;
  } else if (name == "exp3") {
    c.domain = "gamma_shape";
    c.rhs = "piecewise";
    c.mesh.kind = MeshSpec::Kind::Nested;
    c.mesh.n_seeds = 25;
    c.mesh.seed = 3;
    c.expected_rate = 2.0 / 3.0;
  } else if (name == "exp4") {
    c.domain = "square_hole";
    c.rhs = "smooth";
    c.beta = 1.0;
    c.gamma = 1.0;
    c.mesh.kind = MeshSpec::Kind::Nested;
    c.mesh.n_seeds = 36;
    c.mesh.seed = 4;
    c.expected_rate = 2.0 / 3.0;
  } else if (name == "exp5") {
    c.domain = "two_holes";
    c.rhs = "smooth";
    c.beta = 1.0;
    c.gamma = 1.0;
    c.mesh.kind = MeshSpec::Kind::Nested;
    c.mesh.n_seeds = 75;
    c.mesh.seed = 5;
    c.expected_rate = 2.0 / 3.0;
  } else if (name == "custom") {
    c.output = "report.csv";
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return c;
}

namespace {

template <typename T>
T parse_num(const std::string& key, const std::string& value, T (*conv)(const std::string&)) {
  try {
    return conv(value);
  } catch (const std::exception&) {
    throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  }
}

double to_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

int to_int(const std::string& s) {
  size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

unsigned long to_ulong(const std::string& s) {
  size_t pos = 0;
  const unsigned long v = std::stoul(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_option(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "name") {
    config.name = value;
  } else if (key == "k") {
    config.k = parse_num(key, value, to_int);
  } else if (key == "beta") {
    config.beta = parse_num(key, value, to_double);
  } else if (key == "gamma") {
    config.gamma = parse_num(key, value, to_double);
  } else if (key == "domain") {
    config.domain = value;
  } else if (key == "rhs") {
    config.rhs = value;
  } else if (key == "expected_rate") {
    config.expected_rate = parse_num(key, value, to_double);
  } else if (key == "output") {
    config.output = value;
  } else if (key == "mesh.kind") {
    if (value == "structured")
      config.mesh.kind = MeshSpec::Kind::Structured;
    else if (value == "random")
      config.mesh.kind = MeshSpec::Kind::Random;
    else if (value == "nested")
      config.mesh.kind = MeshSpec::Kind::Nested;
    else if (value == "file")
      config.mesh.kind = MeshSpec::Kind::File;
    else
      throw ConfigError("config: unknown mesh.kind '" + value + "'");
  } else if (key == "mesh.levels") {
    config.mesh.levels = parse_num(key, value, to_int);
  } else if (key == "mesh.seed") {
    config.mesh.seed = parse_num(key, value, to_ulong);
  } else if (key == "mesh.n_seeds") {
    config.mesh.n_seeds = parse_num(key, value, to_int);
  } else if (key == "mesh.file") {
    config.mesh.file = value;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  ExperimentConfig config = preset("custom");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    set_option(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

namespace {

int default_levels(const ExperimentConfig& c) {
  // Largest families whose finest level solves comfortably in memory.
  if (c.name == "exp1") return c.k == 1 ? 6 : 5;
  if (c.name == "exp2" || c.name == "exp3") return c.k == 1 ? 7 : 6;
  if (c.name == "exp4") return 6;
  if (c.name == "exp5") return c.k == 1 ? 6 : 5;
  return c.k == 1 ? 5 : 4;
}

void validate_config(const ExperimentConfig& c, const DomainSpec& domain) {
  if (c.k != 1 && c.k != 2) throw ConfigError("config: k must be 1 or 2");
  if (c.beta < 0 || c.gamma < 0) throw ConfigError("config: beta and gamma must be nonnegative");
  if (c.name == "exp4" || c.name == "exp5") {
    if (!(c.gamma > 0)) throw ConfigError("config: " + c.name + " requires gamma > 0");
  } else if (c.name != "custom") {
    if (c.gamma != 0) throw ConfigError("config: " + c.name + " requires gamma = 0");
  }
  if (c.gamma == 0 && !domain.holes.empty())
    throw ConfigError("config: gamma = 0 requires a simply connected domain");
  const bool nested =
      c.mesh.kind == MeshSpec::Kind::Nested || c.mesh.kind == MeshSpec::Kind::File;
  if (c.rhs != "exp1" && !nested)
    throw ConfigError("config: inter-level errors need a nested mesh family (mesh.kind = "
                      "nested or file)");
  if (c.mesh.kind == MeshSpec::Kind::File && c.mesh.file.empty())
    throw ConfigError("config: mesh.kind = file requires mesh.file");
  if (c.mesh.kind != MeshSpec::Kind::Structured && c.mesh.kind != MeshSpec::Kind::File &&
      c.mesh.n_seeds < 3)
    throw ConfigError("config: mesh.n_seeds must be at least 3");
}

PolygonMesh level_mesh(const ExperimentConfig& c, const DomainSpec& domain, int level,
                       const PolygonMesh* prev) {
  switch (c.mesh.kind) {
    case MeshSpec::Kind::Structured:
      return gen_structured_voronoi(5 << level);
    case MeshSpec::Kind::Random:
      return gen_random_voronoi(domain, c.mesh.n_seeds << (2 * level), c.mesh.seed + level);
    case MeshSpec::Kind::Nested:
      if (level == 0) return gen_random_voronoi(domain, c.mesh.n_seeds, c.mesh.seed);
      return level == 1 ? refine_to_quads(*prev) : refine_quads(*prev);
    case MeshSpec::Kind::File:
      if (level == 0) return load_mesh(c.mesh.file);
      return level == 1 ? refine_to_quads(*prev) : refine_quads(*prev);
  }
  throw ConfigError("config: unknown mesh kind");
}

std::string markdown_path(const std::string& csv_path) {
  if (csv_path.size() >= 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
    return csv_path.substr(0, csv_path.size() - 4) + ".md";
  return csv_path + ".md";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file " + path);
  out << text;
}

}  // namespace

ConvergenceReport run(const ExperimentConfig& config) {
  const DomainSpec domain = DomainSpec::by_name(config.domain);
  validate_config(config, domain);
  const VectorFn f = rhs_by_name(config.rhs);
  const bool exact = config.rhs == "exp1";
  const int levels = config.mesh.levels > 0 ? config.mesh.levels : default_levels(config);

  ConvergenceReport report;
  report.name = config.name;
  report.k = config.k;
  report.relative = !exact;
  report.n_coeffs = static_cast<int>(domain.holes.size());
  report.expected_rate = config.expected_rate;

  const VectorFn u_exact = manufactured::u();
  const VectorFn grad_xi_exact = manufactured::grad_xi();

  std::shared_ptr<const VemSpace> prev_space;
  HodgeSolution prev_sol;
  for (int level = 0; level < levels; ++level) {
    try {
      PolygonMesh mesh =
          level_mesh(config, domain, level, prev_space ? &prev_space->mesh() : nullptr);
      auto space = std::make_shared<const VemSpace>(mesh, config.k);
      HodgeSolution sol = solve({space, config.beta, config.gamma, f});

      ReportRow row;
      row.level = level;
      row.h = space->mesh().mesh_size();
      row.dofs = space->n_dofs();
      row.e_bdry = boundary_tangential_error(sol.u_h).l2;
      row.c = sol.coeffs;
      if (exact) {
        row.e_u = l2_error_u(sol.u_h, u_exact);
        row.e_xi = h1_broken_error_xi(sol.xi_h, grad_xi_exact);
      } else if (level > 0) {
        row.e_u = inter_level_relative_u(prev_sol.u_h, sol.u_h);
        row.e_xi = inter_level_relative_xi(prev_sol.xi_h, sol.xi_h);
        if (!sol.coeffs.empty())
          row.rel_c = coefficient_relative_error(prev_sol.coeffs, sol.coeffs);
      }
      report.rows.push_back(std::move(row));

      prev_space = space;
      prev_sol = std::move(sol);
    } catch (const std::exception& e) {
      throw Error("level " + std::to_string(level) + ": " + e.what());
    }
  }

  compute_rates(report);
  report.validate();
  write_file(config.output, to_csv(report));
  write_file(markdown_path(config.output), to_markdown(report));
  return report;
}

}  // namespace vemqc
