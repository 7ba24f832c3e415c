// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "vemqc/error_metrics.hpp"

namespace vemqc {

struct MeshSpec {
  enum class Kind { Structured, Random, Nested, File };
  Kind kind = Kind::Structured;
  int levels = 0;  // 0 = per-preset default
  unsigned long seed = 1;
  int n_seeds = 25;
  std::string file;
};

struct ExperimentConfig {
  std::string name = "custom";
  int k = 1;
  double beta = 0.0;
  double gamma = 0.0;
  std::string domain = "unit_square";
  std::string rhs = "exp1";  // exp1 | piecewise | smooth
  MeshSpec mesh;
  double expected_rate = NAN;
  std::string output = "report.csv";
};

// The five built-in studies, fully populated, plus "custom" defaults.
ExperimentConfig preset(const std::string& name);

// Flat `key = value` file, `#` comments, dotted keys (mesh.levels, ...).
ExperimentConfig load_config(const std::string& path);
void set_option(ExperimentConfig& config, const std::string& key, const std::string& value);

// Solves every level of the mesh family, computes the metrics the
// right-hand side admits (exact errors for the manufactured solution,
// inter-level relative errors otherwise), writes CSV + markdown next to
// `config.output`, and returns the report.
ConvergenceReport run(const ExperimentConfig& config);

// Manufactured solution on the unit square: u = curl phi with
// phi = sin^3(pi x) sin^3(pi y), xi = curl u, f the matching load.
namespace manufactured {
ScalarFn phi();
VectorFn u();
ScalarFn xi();
VectorFn grad_xi();
VectorFn rhs();
}  // namespace manufactured

// Radius-threshold piecewise-constant load and the smooth load of the
// hole-domain studies.
VectorFn piecewise_constant_rhs();
VectorFn smooth_rhs();

VectorFn rhs_by_name(const std::string& name);

}  // namespace vemqc
