// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <set>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "vemqc/errors.hpp"
#include "vemqc/experiments.hpp"
#include "vemqc/voronoi.hpp"

namespace {

struct RunArgs {
  std::string config, preset = "exp1";
  // Raw override strings, applied through the config key machinery so the
  // CLI and the file format accept identical values.
  std::string k, levels, seed, n_seeds, mesh_kind, mesh_file, domain, rhs, beta, gamma, out;
};

int do_run(const CLI::App& cmd, const RunArgs& a) {
  vemqc::ExperimentConfig cfg =
      a.config.empty() ? vemqc::preset(a.preset) : vemqc::load_config(a.config);
  const std::pair<const char*, const std::string*> overrides[] = {
      {"k", &a.k},           {"mesh.levels", &a.levels}, {"mesh.seed", &a.seed},
      {"mesh.n_seeds", &a.n_seeds}, {"mesh.kind", &a.mesh_kind}, {"mesh.file", &a.mesh_file},
      {"domain", &a.domain}, {"rhs", &a.rhs},            {"beta", &a.beta},
      {"gamma", &a.gamma},   {"output", &a.out},
  };
  (void)cmd;
  for (const auto& [key, value] : overrides)
    if (!value->empty()) vemqc::set_option(cfg, key, *value);
  const vemqc::ConvergenceReport report = vemqc::run(cfg);
  std::cout << vemqc::to_markdown(report);
  std::cout << "wrote " << cfg.output << "\n";
  return 0;
}

int do_mesh_gen(const std::string& kind, const std::string& domain_name, int n, int n_seeds,
                unsigned long seed, const std::string& out) {
  vemqc::PolygonMesh mesh;
  if (kind == "structured") {
    mesh = vemqc::gen_structured_voronoi(n);
  } else if (kind == "random") {
    mesh = vemqc::gen_random_voronoi(vemqc::DomainSpec::by_name(domain_name), n_seeds, seed);
  } else {
    throw vemqc::ConfigError("mesh gen: unknown kind '" + kind + "'");
  }
  vemqc::save_mesh(mesh, out);
  std::cout << "wrote " << out << " (" << mesh.vertices.size() << " vertices, "
            << mesh.cells.size() << " cells)\n";
  return 0;
}

int do_mesh_refine(const std::string& in, const std::string& out, const std::string& mode) {
  const vemqc::PolygonMesh mesh = vemqc::load_mesh(in);
  vemqc::PolygonMesh fine;
  bool all_quads = true;
  for (const auto& cell : mesh.cells) all_quads = all_quads && cell.size() == 4;
  if (mode == "quads" || (mode == "auto" && all_quads))
    fine = vemqc::refine_quads(mesh);
  else if (mode == "to-quads" || mode == "auto")
    fine = vemqc::refine_to_quads(mesh);
  else
    throw vemqc::ConfigError("mesh refine: unknown mode '" + mode + "'");
  vemqc::save_mesh(fine, out);
  std::cout << "wrote " << out << " (" << fine.vertices.size() << " vertices, "
            << fine.cells.size() << " cells)\n";
  return 0;
}

int do_mesh_info(const std::string& in) {
  const vemqc::PolygonMesh mesh = vemqc::load_mesh(in);
  size_t n_edges = 0;
  std::set<std::pair<int, int>> edges;
  for (const auto& cell : mesh.cells)
    for (size_t i = 0; i < cell.size(); ++i) {
      const int a = cell[i], b = cell[(i + 1) % cell.size()];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  n_edges = edges.size();
  const vemqc::ShapeReport shape = vemqc::shape_regularity(mesh);
  std::cout << "vertices:  " << mesh.vertices.size() << "\n"
            << "edges:     " << n_edges << "\n"
            << "cells:     " << mesh.cells.size() << "\n"
            << "h:         " << shape.h << "\n"
            << "min edge / diameter:   " << shape.min_edge_ratio << "\n"
            << "kernel radius / diam:  " << shape.star_kernel_ratio << "\n"
            << "dofs (k=1): " << mesh.vertices.size() << "\n"
            << "dofs (k=2): " << mesh.vertices.size() + n_edges + mesh.cells.size() << "\n";
  for (const auto& loop : mesh.loops)
    std::cout << "loop " << loop.label << ": " << loop.vertices.size() << " vertices\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal VEM solver for the planar quad-curl problem"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a convergence study");
  RunArgs ra;
  run_cmd->add_option("--config", ra.config, "Config file of 'key = value' lines");
  run_cmd->add_option("--preset", ra.preset, "exp1|exp2|exp3|exp4|exp5|custom");
  run_cmd->add_option("--k", ra.k, "Order, 1 or 2");
  run_cmd->add_option("--levels", ra.levels, "Number of mesh levels");
  run_cmd->add_option("--seed", ra.seed, "Mesh generator seed");
  run_cmd->add_option("--n-seeds", ra.n_seeds, "Voronoi seed count at level 0");
  run_cmd->add_option("--mesh-kind", ra.mesh_kind, "structured|random|nested|file");
  run_cmd->add_option("--mesh-file", ra.mesh_file, "Level-0 mesh file for --mesh-kind file");
  run_cmd->add_option("--domain", ra.domain, "unit_square|gamma_shape|square_hole|two_holes");
  run_cmd->add_option("--rhs", ra.rhs, "exp1|piecewise|smooth");
  run_cmd->add_option("--beta", ra.beta, "Zeroth-order coefficient");
  run_cmd->add_option("--gamma", ra.gamma, "Curl-curl coefficient");
  run_cmd->add_option("--out", ra.out, "Output CSV path (markdown written alongside)");

  auto* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
  mesh_cmd->require_subcommand(1);

  auto* gen_cmd = mesh_cmd->add_subcommand("gen", "Generate a mesh");
  std::string g_kind = "random", g_domain = "unit_square", g_out = "mesh.txt";
  int g_n = 5, g_nseeds = 25;
  unsigned long g_seed = 1;
  gen_cmd->add_option("--kind", g_kind, "structured|random");
  gen_cmd->add_option("--domain", g_domain, "Domain name (random kind)");
  gen_cmd->add_option("--n", g_n, "Grid subdivisions (structured kind)");
  gen_cmd->add_option("--n-seeds", g_nseeds, "Seed count (random kind)");
  gen_cmd->add_option("--seed", g_seed, "RNG seed (random kind)");
  gen_cmd->add_option("--out", g_out, "Output mesh path");

  auto* ref_cmd = mesh_cmd->add_subcommand("refine", "Refine a mesh once");
  std::string r_in, r_out = "refined.txt", r_mode = "auto";
  ref_cmd->add_option("--in", r_in, "Input mesh path")->required();
  ref_cmd->add_option("--out", r_out, "Output mesh path");
  ref_cmd->add_option("--mode", r_mode, "auto|quads|to-quads");

  auto* info_cmd = mesh_cmd->add_subcommand("info", "Print mesh statistics");
  std::string i_in;
  info_cmd->add_option("--in", i_in, "Input mesh path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(*run_cmd, ra);
    if (gen_cmd->parsed()) return do_mesh_gen(g_kind, g_domain, g_n, g_nseeds, g_seed, g_out);
    if (ref_cmd->parsed()) return do_mesh_refine(r_in, r_out, r_mode);
    if (info_cmd->parsed()) return do_mesh_info(i_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
