// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Exhaustive enumeration over suitable placements, and the big-M of the
// mixed-integer model.

#pragma once

#include <cstdint>

#include "dimfac/evaluate.hpp"
#include "dimfac/grid.hpp"

namespace dimfac {

struct ExactResult {
  Placement placement;
  Evaluation evaluation;
  std::uint64_t tuples = 0;    // size of the Cartesian product of the feasible sets
  std::uint64_t suitable = 0;  // suitable tuples evaluated
};

inline constexpr std::uint64_t kDefaultExactLimit = 10'000'000;

// Minimizer over all suitable placements; ties go to the lexicographically
// smallest placement. Throws size_limit when the product of feasible-set sizes
// exceeds `limit`, infeasible when no placement is suitable.
ExactResult enumerate_exact(const Evaluator& ev,
                            std::uint64_t limit = kDefaultExactLimit,
                            int threads = 0);

// Largest unit utility over every facility, feasible root cell and cell,
// footprint values (-a) included.
double compute_big_m(const Evaluator& ev, int threads = 0);

}  // namespace dimfac
