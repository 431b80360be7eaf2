// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// dimfac command-line front end. Uses only the C API.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimfac/dimfac.h"

namespace {

struct InstanceDeleter {
  void operator()(dimfac_instance* p) const { dimfac_instance_free(p); }
};
struct SolutionDeleter {
  void operator()(dimfac_solution* p) const { dimfac_solution_free(p); }
};
using InstancePtr = std::unique_ptr<dimfac_instance, InstanceDeleter>;
using SolutionPtr = std::unique_ptr<dimfac_solution, SolutionDeleter>;

struct Failure {
  dimfac_status status;
};

void check(dimfac_status s) {
  if (s != DIMFAC_OK) throw Failure{s};
}

InstancePtr load_instance(const std::string& path, int threads) {
  dimfac_instance* inst = nullptr;
  check(dimfac_instance_load(path.c_str(), threads, &inst));
  InstancePtr p(inst);
  for (size_t i = 0; i < dimfac_instance_warning_count(inst); ++i)
    std::fprintf(stderr, "warning: %s\n", dimfac_instance_warning(inst, i));
  return p;
}

// "k1,l1;k2,l2;..." -> k1, l1, k2, l2, ...
std::optional<std::vector<int>> parse_placement(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    int k = 0, l = 0;
    char extra = 0;
    if (std::sscanf(item.c_str(), " %d , %d %c", &k, &l, &extra) != 2) return std::nullopt;
    out.push_back(k);
    out.push_back(l);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

void report(const dimfac_instance* inst, const dimfac_solution* sol) {
  const size_t n = dimfac_solution_placement(sol, nullptr, 0);
  std::vector<int> cells(2 * n);
  dimfac_solution_placement(sol, cells.data(), n);
  std::printf("total %.12g\n", dimfac_solution_total(sol));
  for (size_t i = 0; i < n; ++i)
    std::printf("facility %zu at (%d, %d): install %.12g congestion %.12g demand %.12g\n", i + 1, cells[2 * i],
                cells[2 * i + 1], dimfac_solution_install(sol, i), dimfac_solution_congestion(sol, i),
                dimfac_solution_assigned_mass(sol, i));
  std::printf("lost %.12g\n", dimfac_solution_lost(sol));
  std::printf("preprocess %.3f s, solve %.3f s\n", dimfac_instance_preprocess_seconds(inst),
              dimfac_solution_solve_seconds(sol));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-allocation of dimensional facilities on a discretized region"};
  app.set_version_flag("--version", dimfac_version());
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: DIMFAC_THREADS or the core count)")
      ->check(CLI::NonNegativeNumber);

  std::string config, out, method = "grasp", placement, warm, solution;
  std::optional<uint64_t> seed;
  bool show_grid = false;

  auto* solve = app.add_subcommand("solve", "Solve an instance and write a solution record");
  solve->add_option("--config", config, "Instance config (JSON)")->required();
  solve->add_option("--method", method, "grasp or exact")->check(CLI::IsMember({"grasp", "exact"}));
  solve->add_option("--seed", seed, "Override the config seed");
  solve->add_option("--out", out, "Solution record path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate an explicit placement");
  evaluate->add_option("--config", config, "Instance config (JSON)")->required();
  evaluate->add_option("--placement", placement, "Root cells as \"k1,l1;k2,l2;...\"")->required();
  evaluate->add_option("--out", out, "Solution record path")->required();

  auto* milp = app.add_subcommand("export-milp", "Write the mixed-integer model in CPLEX LP format");
  milp->add_option("--config", config, "Instance config (JSON)")->required();
  milp->add_option("--out", out, "LP file path")->required();
  milp->add_option("--warm-start", warm, "Solution record whose placement is embedded as a hint");

  auto* render = app.add_subcommand("render", "Draw a solution as SVG");
  render->add_option("--config", config, "Instance config (JSON)")->required();
  render->add_option("--solution", solution, "Solution record")->required();
  render->add_option("--out", out, "SVG path")->required();
  render->add_flag("--show-grid", show_grid, "Draw the grid lines");

  CLI11_PARSE(app, argc, argv);
  if (threads == 0) threads = dimfac_default_threads();

  try {
    InstancePtr inst = load_instance(config, threads);
    if (*solve) {
      dimfac_solve_options opts{seed.value_or(0), seed ? 1 : 0, threads};
      dimfac_solution* raw = nullptr;
      check(method == "exact" ? dimfac_solve_exact(inst.get(), &opts, &raw)
                              : dimfac_solve_grasp(inst.get(), &opts, &raw));
      SolutionPtr sol(raw);
      check(dimfac_solution_write(sol.get(), out.c_str()));
      report(inst.get(), sol.get());
    } else if (*evaluate) {
      const auto cells = parse_placement(placement);
      if (!cells) {
        std::fprintf(stderr, "error: --placement must look like \"k1,l1;k2,l2\"\n");
        return 2;
      }
      dimfac_solution* raw = nullptr;
      check(dimfac_evaluate(inst.get(), cells->data(), cells->size() / 2, &raw));
      SolutionPtr sol(raw);
      check(dimfac_solution_write(sol.get(), out.c_str()));
      report(inst.get(), sol.get());
    } else if (*milp) {
      SolutionPtr ws;
      if (!warm.empty()) {
        dimfac_solution* raw = nullptr;
        check(dimfac_solution_load(inst.get(), warm.c_str(), &raw));
        ws.reset(raw);
      }
      dimfac_milp_info info{};
      check(dimfac_export_milp(inst.get(), out.c_str(), ws.get(), threads, &info));
      if (info.oversized)
        std::fprintf(stderr, "warning: model has %zu constraints; external solvers may struggle\n",
                     info.constraints);
      std::printf("variables %zu binaries %zu constraints %zu big-M %.12g\n", info.variables, info.binaries,
                  info.constraints, info.big_m);
    } else if (*render) {
      dimfac_solution* raw = nullptr;
      check(dimfac_solution_load(inst.get(), solution.c_str(), &raw));
      SolutionPtr sol(raw);
      check(dimfac_render_svg(inst.get(), sol.get(), out.c_str(), show_grid ? 1 : 0));
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", dimfac_status_name(f.status), dimfac_last_error());
    return 1;
  }
  return 0;
}
