// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Lower-level allocation and upper-level objective for a fixed placement.

#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "dimfac/costs.hpp"
#include "dimfac/expr.hpp"
#include "dimfac/geometry.hpp"
#include "dimfac/grid.hpp"

namespace dimfac {

enum class UtilityKind { norm_to_root, gauge, max_distance };

struct UtilitySpec {
  UtilityKind kind = UtilityKind::norm_to_root;
  Norm norm;             // norm_to_root, max_distance
  bool clamped = false;  // gauge: f(max(0, g - 1)) instead of f(g)
  Expr scale;            // f(t); empty means identity

  double apply_scale(double t) const;
};

struct Facility {
  Shape shape;
  double a = 1.0;
  UtilitySpec utility;
  PiecewiseLinear install_cost;
  PiecewiseLinear congestion_cost;
};

// Continuous utility of a customer at q for facility `f` rooted at `root`.
double utility_at(const Facility& f, Point root, Point q);

struct Problem {
  DiscretizedInstance di;
  std::vector<Facility> facilities;
  PiecewiseLinear lost_cost;
  std::vector<std::string> warnings;

  int rho() const { return di.rho(); }
};

// Non-fatal check that each utility scale is non-decreasing over the
// reachable range of its argument.
std::vector<std::string> validate_problem(const Problem& p);

// u^i for cell `cell` with facility i rooted at the center of `at`; -a_i on
// the footprint.
double unit_utility(const DiscretizedInstance& di,
                    const std::vector<Facility>& facs, int i, CellIndex at,
                    CellIndex cell);

struct Allocation {
  std::vector<int> owner;            // per omega cell: facility index
  std::vector<std::uint8_t> covered;  // per omega cell: 1 if in a footprint
  std::vector<double> assigned_mass;  // per facility
  std::vector<double> install_mass;   // per facility
  double lost_mass = 0.0;
};

struct Evaluation {
  double total = 0.0;
  std::vector<double> install;
  std::vector<double> congestion;
  double lost = 0.0;
  Allocation allocation;
};

using UtilityRow = std::shared_ptr<const std::vector<double>>;

// Evaluates placements of one problem. Utility rows are memoized in a bounded
// LRU cache shared by all threads.
class Evaluator {
 public:
  explicit Evaluator(const Problem& problem, std::size_t cache_doubles = 1u << 23);

  const Problem& problem() const { return problem_; }

  // u^i over all omega cells for facility i at omega cell `at`.
  UtilityRow row(int i, int at) const;

  Allocation solve_lower_level(const Placement& p) const;
  Evaluation objective(const Placement& p) const;

  // Objective total from omega indices of a suitable placement; skips the
  // suitability check and the allocation copy.
  double total(const std::vector<int>& at) const;

  std::uint64_t cache_hits() const;
  std::uint64_t cache_misses() const;

 private:
  Allocation allocate(const std::vector<int>& at) const;
  Evaluation score(Allocation alloc) const;
  UtilityRow compute_row(int i, int at) const;

  const Problem& problem_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::list<std::uint64_t> lru_;
  mutable std::unordered_map<std::uint64_t,
                             std::pair<UtilityRow, std::list<std::uint64_t>::iterator>>
      rows_;
  mutable std::uint64_t hits_ = 0;
  mutable std::uint64_t misses_ = 0;
};

// Cost of assigning a cell with demand w to a facility with access cost a and
// utility u. Zero-demand cells compare on a + u so the choice stays
// meaningful.
inline double assignment_key(double a, double w, double u) {
  return w == 0.0 ? a + u : a * w + w * u;
}

}  // namespace dimfac
