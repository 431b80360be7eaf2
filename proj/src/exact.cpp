// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dimfac/error.hpp"
#include "dimfac/milp.hpp"
#include "dimfac/parallel.hpp"

namespace dimfac {

namespace {

int resolve_threads(int t) { return t > 0 ? t : default_threads(); }

struct Best {
  bool found = false;
  double total = 0.0;
  std::vector<int> at;
  std::uint64_t suitable = 0;
};

// Depth-first walk over facilities 1..rho-1 with facility 0 fixed; cells
// covered by already placed footprints are marked in `occ`.
void walk(const Evaluator& ev, std::vector<int>& at, std::vector<int>& occ,
          std::size_t depth, Best& best) {
  const DiscretizedInstance& di = ev.problem().di;
  if (depth == at.size()) {
    const double t = ev.total(at);
    ++best.suitable;
    // Omega order is cell order, so the first of equal totals is the
    // lexicographically smallest placement.
    if (!best.found || t < best.total) {
      best.found = true;
      best.total = t;
      best.at = at;
    }
    return;
  }
  const int i = static_cast<int>(depth);
  for (int o : di.facilities[depth].feasible) {
    const auto& fp = di.footprint(i, o);
    bool clash = false;
    for (int c : fp)
      if (occ[static_cast<std::size_t>(c)]) {
        clash = true;
        break;
      }
    if (clash) continue;
    for (int c : fp) occ[static_cast<std::size_t>(c)] = 1;
    at[depth] = o;
    walk(ev, at, occ, depth + 1, best);
    for (int c : fp) occ[static_cast<std::size_t>(c)] = 0;
  }
}

struct UtilityRange {
  double max_all = -std::numeric_limits<double>::infinity();
  double max_off = -std::numeric_limits<double>::infinity();
  double min_off = std::numeric_limits<double>::infinity();
};

// Streams u^i over every (i, root cell, cell) without keeping the table.
UtilityRange utility_range(const Evaluator& ev, int threads) {
  const Problem& pb = ev.problem();
  const DiscretizedInstance& di = pb.di;
  std::vector<std::pair<int, int>> roots;
  for (int i = 0; i < di.rho(); ++i)
    for (int o : di.facilities[static_cast<std::size_t>(i)].feasible) roots.emplace_back(i, o);
  std::vector<UtilityRange> part(roots.size());
  parallel_for(roots.size(), resolve_threads(threads), [&](std::size_t r) {
    const auto [i, o] = roots[r];
    const Facility& f = pb.facilities[static_cast<std::size_t>(i)];
    const auto& fp = di.footprint(i, o);
    const Point root = di.centers[static_cast<std::size_t>(o)];
    UtilityRange u;
    std::size_t next = 0;
    for (int c = 0; c < di.size(); ++c) {
      if (next < fp.size() && fp[next] == c) {
        ++next;
        u.max_all = std::max(u.max_all, -f.a);
        continue;
      }
      const double v = utility_at(f, root, di.centers[static_cast<std::size_t>(c)]);
      u.max_all = std::max(u.max_all, v);
      u.max_off = std::max(u.max_off, v);
      u.min_off = std::min(u.min_off, v);
    }
    part[r] = u;
  });
  UtilityRange out;
  for (const UtilityRange& u : part) {
    out.max_all = std::max(out.max_all, u.max_all);
    out.max_off = std::max(out.max_off, u.max_off);
    out.min_off = std::min(out.min_off, u.min_off);
  }
  return out;
}

}  // namespace

ExactResult enumerate_exact(const Evaluator& ev, std::uint64_t limit, int threads) {
  const DiscretizedInstance& di = ev.problem().di;
  const std::size_t rho = static_cast<std::size_t>(di.rho());
  ExactResult res;
  double product = 1.0;
  std::uint64_t tuples = 1;
  for (const FacilityCells& fc : di.facilities) {
    product *= static_cast<double>(fc.feasible.size());
    tuples *= static_cast<std::uint64_t>(fc.feasible.size());
  }
  if (product > static_cast<double>(limit))
    throw Error(Errc::size_limit,
                fmt::format("enumeration needs {:.0f} placement tuples, limit is {}", product, limit));
  res.tuples = tuples;
  if (rho == 0) throw Error(Errc::infeasible, "no facilities");

  const std::vector<int>& outer = di.facilities[0].feasible;
  std::vector<Best> part(outer.size());
  parallel_for(outer.size(), resolve_threads(threads), [&](std::size_t r) {
    std::vector<int> at(rho, -1);
    std::vector<int> occ(static_cast<std::size_t>(di.size()), 0);
    at[0] = outer[r];
    for (int c : di.footprint(0, outer[r])) occ[static_cast<std::size_t>(c)] = 1;
    walk(ev, at, occ, 1, part[r]);
  });

  Best best;
  for (const Best& b : part) {
    res.suitable += b.suitable;
    if (b.found && (!best.found || b.total < best.total)) best = b;
  }
  if (!best.found) throw Error(Errc::infeasible, "no suitable placement exists");
  res.placement.resize(rho);
  for (std::size_t i = 0; i < rho; ++i) res.placement[i] = di.cells[static_cast<std::size_t>(best.at[i])];
  res.evaluation = ev.objective(res.placement);
  return res;
}

double compute_big_m(const Evaluator& ev, int threads) {
  return utility_range(ev, threads).max_all;
}

double export_big_m(const Evaluator& ev, int threads) {
  const UtilityRange u = utility_range(ev, threads);
  double m = 0.0;
  if (std::isfinite(u.max_off)) m = std::max(m, u.max_off - std::min(0.0, u.min_off));
  for (const Facility& f : ev.problem().facilities) m = std::max(m, f.a);
  return m;
}

}  // namespace dimfac
