// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/dimfac.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include <fmt/format.h>

#include "dimfac/config.hpp"
#include "dimfac/error.hpp"
#include "dimfac/exact.hpp"
#include "dimfac/grasp.hpp"
#include "dimfac/milp.hpp"
#include "dimfac/parallel.hpp"
#include "dimfac/svg.hpp"

using namespace dimfac;

struct dimfac_instance {
  InstanceConfig cfg;
  Problem problem;
  std::unique_ptr<Evaluator> ev;
  double preprocess_seconds = 0.0;
};

struct dimfac_solution {
  SolutionRecord record;
};

namespace {

thread_local std::string last_error;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

dimfac_status status_of(Errc c) { return static_cast<dimfac_status>(static_cast<int>(c) + 1); }

template <class F>
dimfac_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return DIMFAC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DIMFAC_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DIMFAC_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

int resolve_threads(int t) { return t > 0 ? t : default_threads(); }

dimfac_instance* make_instance(InstanceConfig cfg, int threads) {
  const auto t0 = Clock::now();
  Problem p = build_problem(cfg, resolve_threads(threads));
  auto inst = new dimfac_instance{std::move(cfg), std::move(p), nullptr, 0.0};
  inst->ev = std::make_unique<Evaluator>(inst->problem);
  inst->preprocess_seconds = seconds_since(t0);
  return inst;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double at_or_nan(const std::vector<double>& v, size_t i) {
  return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

extern "C" {

const char* dimfac_version(void) { return DIMFAC_VERSION; }

const char* dimfac_status_name(dimfac_status s) {
  if (s == DIMFAC_OK) return "ok";
  if (s == DIMFAC_E_INTERNAL) return "internal";
  const int c = static_cast<int>(s) - 1;
  if (c < 0 || c > static_cast<int>(Errc::mismatch)) return "unknown";
  return errc_name(static_cast<Errc>(c));
}

const char* dimfac_last_error(void) { return last_error.c_str(); }

int dimfac_default_threads(void) { return default_threads(); }

void dimfac_string_free(char* s) { std::free(s); }

dimfac_status dimfac_instance_load(const char* path, int threads, dimfac_instance** out) {
  return guard([&] {
    require(path && out, "path and out must not be null");
    *out = nullptr;
    *out = make_instance(load_config(path), threads);
  });
}

dimfac_status dimfac_instance_from_json(const char* json, int threads, dimfac_instance** out) {
  return guard([&] {
    require(json && out, "json and out must not be null");
    *out = nullptr;
    *out = make_instance(parse_config(json), threads);
  });
}

void dimfac_instance_free(dimfac_instance* inst) { delete inst; }

int dimfac_instance_facilities(const dimfac_instance* inst) { return inst ? inst->problem.di.rho() : 0; }
int dimfac_instance_cells(const dimfac_instance* inst) { return inst ? inst->problem.di.size() : 0; }
int dimfac_instance_nx(const dimfac_instance* inst) { return inst ? inst->cfg.nx : 0; }
int dimfac_instance_ny(const dimfac_instance* inst) { return inst ? inst->cfg.ny : 0; }
uint64_t dimfac_instance_seed(const dimfac_instance* inst) { return inst ? inst->cfg.grasp.seed : 0; }
double dimfac_instance_preprocess_seconds(const dimfac_instance* inst) {
  return inst ? inst->preprocess_seconds : 0.0;
}
size_t dimfac_instance_warning_count(const dimfac_instance* inst) {
  return inst ? inst->problem.warnings.size() : 0;
}
const char* dimfac_instance_warning(const dimfac_instance* inst, size_t index) {
  if (!inst || index >= inst->problem.warnings.size()) return nullptr;
  return inst->problem.warnings[index].c_str();
}

dimfac_status dimfac_instance_to_json(const dimfac_instance* inst, char** out) {
  return guard([&] {
    require(inst && out, "instance and out must not be null");
    *out = dup_string(dump_config(inst->cfg));
  });
}

dimfac_status dimfac_solve_grasp(const dimfac_instance* inst, const dimfac_solve_options* opts,
                                 dimfac_solution** out) {
  return guard([&] {
    require(inst && out, "instance and out must not be null");
    *out = nullptr;
    GraspParams g = inst->cfg.grasp;
    if (opts && opts->has_seed) g.seed = opts->seed;
    g.threads = resolve_threads(opts ? opts->threads : 0);
    const auto t0 = Clock::now();
    const GraspResult r = grasp_solve(*inst->ev, g);
    const double dt = seconds_since(t0);
    auto sol = std::make_unique<dimfac_solution>();
    sol->record = make_record(inst->cfg, inst->problem, "grasp", g.seed, r.placement, r.evaluation);
    sol->record.stats = {{"best_initial", r.best_initial},
                         {"outer_visits", r.outer_visits},
                         {"improvements", r.improvements},
                         {"failed_slots", r.failed_slots},
                         {"wave_restarts", r.wave_restarts},
                         {"evaluations", static_cast<double>(r.evaluations)}};
    sol->record.preprocess_seconds = inst->preprocess_seconds;
    sol->record.solve_seconds = dt;
    *out = sol.release();
  });
}

dimfac_status dimfac_solve_exact(const dimfac_instance* inst, const dimfac_solve_options* opts,
                                 dimfac_solution** out) {
  return guard([&] {
    require(inst && out, "instance and out must not be null");
    *out = nullptr;
    const auto t0 = Clock::now();
    const ExactResult r =
        enumerate_exact(*inst->ev, inst->cfg.exact_limit, resolve_threads(opts ? opts->threads : 0));
    const double dt = seconds_since(t0);
    auto sol = std::make_unique<dimfac_solution>();
    sol->record = make_record(inst->cfg, inst->problem, "exact", 0, r.placement, r.evaluation);
    sol->record.stats = {{"tuples", static_cast<double>(r.tuples)},
                         {"suitable", static_cast<double>(r.suitable)}};
    sol->record.preprocess_seconds = inst->preprocess_seconds;
    sol->record.solve_seconds = dt;
    *out = sol.release();
  });
}

dimfac_status dimfac_evaluate(const dimfac_instance* inst, const int* cells, size_t n, dimfac_solution** out) {
  return guard([&] {
    require(inst && out && (cells || n == 0), "instance, cells and out must not be null");
    *out = nullptr;
    Placement p;
    for (size_t i = 0; i < n; ++i) p.push_back({cells[2 * i], cells[2 * i + 1]});
    const auto t0 = Clock::now();
    const Evaluation e = inst->ev->objective(p);
    const double dt = seconds_since(t0);
    auto sol = std::make_unique<dimfac_solution>();
    sol->record = make_record(inst->cfg, inst->problem, "evaluate", 0, p, e);
    sol->record.preprocess_seconds = inst->preprocess_seconds;
    sol->record.solve_seconds = dt;
    *out = sol.release();
  });
}

dimfac_status dimfac_solution_load(const dimfac_instance* inst, const char* path, dimfac_solution** out) {
  return guard([&] {
    require(inst && path && out, "instance, path and out must not be null");
    *out = nullptr;
    auto sol = std::make_unique<dimfac_solution>();
    sol->record = load_record(path);
    check_record_matches(sol->record, inst->cfg);
    const SuitabilityReport rep = check_placement(inst->problem.di, sol->record.placement);
    if (!rep.ok()) throw Error(Errc::mismatch, fmt::format("stored placement is not suitable: {}", rep.message()));
    // The stored breakdown is informational; the allocation is rebuilt so that
    // renders and warm starts never depend on hand-edited fields.
    sol->record.evaluation = inst->ev->objective(sol->record.placement);
    *out = sol.release();
  });
}

void dimfac_solution_free(dimfac_solution* sol) { delete sol; }

double dimfac_solution_total(const dimfac_solution* sol) {
  return sol ? sol->record.evaluation.total : std::numeric_limits<double>::quiet_NaN();
}
double dimfac_solution_lost(const dimfac_solution* sol) {
  return sol ? sol->record.evaluation.lost : std::numeric_limits<double>::quiet_NaN();
}
double dimfac_solution_solve_seconds(const dimfac_solution* sol) { return sol ? sol->record.solve_seconds : 0.0; }

size_t dimfac_solution_placement(const dimfac_solution* sol, int* cells, size_t capacity) {
  if (!sol) return 0;
  const Placement& p = sol->record.placement;
  for (size_t i = 0; cells && i < p.size() && i < capacity; ++i) {
    cells[2 * i] = p[i].k;
    cells[2 * i + 1] = p[i].l;
  }
  return p.size();
}

double dimfac_solution_install(const dimfac_solution* sol, size_t i) {
  return sol ? at_or_nan(sol->record.evaluation.install, i) : std::numeric_limits<double>::quiet_NaN();
}
double dimfac_solution_congestion(const dimfac_solution* sol, size_t i) {
  return sol ? at_or_nan(sol->record.evaluation.congestion, i) : std::numeric_limits<double>::quiet_NaN();
}
double dimfac_solution_assigned_mass(const dimfac_solution* sol, size_t i) {
  return sol ? at_or_nan(sol->record.evaluation.allocation.assigned_mass, i)
             : std::numeric_limits<double>::quiet_NaN();
}

dimfac_status dimfac_solution_to_json(const dimfac_solution* sol, char** out) {
  return guard([&] {
    require(sol && out, "solution and out must not be null");
    *out = dup_string(dump_record(sol->record));
  });
}

dimfac_status dimfac_solution_write(const dimfac_solution* sol, const char* path) {
  return guard([&] {
    require(sol && path, "solution and path must not be null");
    write_text_file(path, dump_record(sol->record));
  });
}

dimfac_status dimfac_export_milp(const dimfac_instance* inst, const char* path, const dimfac_solution* warm_start,
                                 int threads, dimfac_milp_info* info) {
  return guard([&] {
    require(inst && path, "instance and path must not be null");
    std::optional<Placement> warm;
    if (warm_start) {
      const SuitabilityReport rep = check_placement(inst->problem.di, warm_start->record.placement);
      if (!rep.ok()) throw Error(Errc::mismatch, fmt::format("warm start is not suitable: {}", rep.message()));
      warm = warm_start->record.placement;
    }
    const ExportStats st = export_milp_lp(*inst->ev, path, warm, resolve_threads(threads));
    if (info) {
      info->variables = st.counts.variables;
      info->binaries = st.counts.binaries;
      info->constraints = st.counts.constraints;
      info->big_m = st.big_m;
      info->oversized = st.counts.constraints > kLargeModelRows ? 1 : 0;
    }
  });
}

dimfac_status dimfac_render_svg(const dimfac_instance* inst, const dimfac_solution* sol, const char* path,
                                int show_grid) {
  return guard([&] {
    require(inst && sol && path, "instance, solution and path must not be null");
    check_record_matches(sol->record, inst->cfg);
    SvgOptions opt;
    opt.show_grid = show_grid != 0;
    for (const FacilityConfig& f : inst->cfg.facilities) opt.names.push_back(f.name);
    write_text_file(path, render_svg(inst->problem, sol->record.placement, sol->record.evaluation, opt));
  });
}

}  // extern "C"
