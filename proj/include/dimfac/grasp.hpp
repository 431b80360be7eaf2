// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// GRASP heuristic: wavefront construction of suitable placements, greedy
// neighborhood descent, and the list-based outer loop.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dimfac/evaluate.hpp"
#include "dimfac/grid.hpp"
#include "dimfac/rng.hpp"

namespace dimfac {

struct GraspParams {
  int psi = 50;             // solution list length
  int varpi = 2;            // root points permuted per visit
  double lambda = 0.05;     // homothecy ratio; 1/lambda must be an integer
  double vartheta = 0.05;   // separation step
  int upsilon1 = 9;         // separation iterations before relocation
  int upsilon2 = 3;         // consecutive separated iterations before growth
  int delta_k = 5;          // greedy neighborhood half-widths
  int delta_l = 5;
  double epsilon_ball = 0;  // relocation ball radius; 0 = 2 * max(hx, hy)
  int max_outer = 0;        // outer visits; 0 = 10 * psi
  int restart_cap = 25;     // wavefront relocations before giving up
  int slot_attempts = 10;   // wavefront attempts per initial list slot
  std::uint64_t seed = 1;
  int threads = 0;          // 0 = default thread count

  // Throws invalid_argument on out-of-range values.
  void validate() const;
  int growth_steps() const;  // 1 / lambda
};

// Point helpers on the union of the feasible cells of facility i.
bool in_feasible_region(const DiscretizedInstance& di, int i, Point q);
Point l1_project(const DiscretizedInstance& di, int i, Point q);
Point random_feasible_point(const DiscretizedInstance& di, int i, Rng& rng);

struct WaveStats {
  int restarts = 0;
  int growth_rounds = 0;
  int separation_moves = 0;
};

// Wavefront construction from roots in the feasible regions. Throws
// construction_failure after params.restart_cap relocations.
Placement wavefront_construct(const DiscretizedInstance& di,
                              const std::vector<Point>& roots,
                              const GraspParams& params, Rng& rng,
                              WaveStats* stats = nullptr);

// Local maximin relocation of facility i away from `others`, constrained to
// its feasible region. The result's minimum distance to `others` is at least
// that of the (projected) start.
Point local_maximin_relocate(const DiscretizedInstance& di, int i,
                             const std::vector<Point>& others, Point start,
                             const GraspParams& params, Rng& rng);

struct GreedyResult {
  Placement placement;
  double total = 0.0;
  int iterations = 0;
  std::uint64_t evaluations = 0;
};

// Best-improvement descent over single-facility moves within the
// (delta_k, delta_l) window. `threads` overrides params.threads when >= 0.
GreedyResult greedy_improve(const Evaluator& ev, const Placement& p,
                            const GraspParams& params, int threads = -1);

struct GraspEntry {
  Placement placement;
  double total = 0.0;
};

struct GraspResult {
  Placement placement;
  Evaluation evaluation;
  std::vector<GraspEntry> list;  // final list, best first
  double best_initial = 0.0;     // best total after the construction phase
  int outer_visits = 0;
  int improvements = 0;
  int failed_slots = 0;
  int wave_restarts = 0;
  std::uint64_t evaluations = 0;
};

GraspResult grasp_solve(const Evaluator& ev, const GraspParams& params);

}  // namespace dimfac
