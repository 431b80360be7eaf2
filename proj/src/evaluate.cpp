// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dimfac/error.hpp"

namespace dimfac {

double UtilitySpec::apply_scale(double t) const {
  if (scale.empty()) return t;
  const double v[1] = {t};
  return scale.evaluate(v);
}

double utility_at(const Facility& f, Point root, Point q) {
  const UtilitySpec& u = f.utility;
  switch (u.kind) {
    case UtilityKind::norm_to_root:
      return u.apply_scale(u.norm(q - root));
    case UtilityKind::gauge: {
      const double g = gauge_value(f.shape, q - root);
      return u.apply_scale(u.clamped ? std::max(0.0, g - 1.0) : g);
    }
    case UtilityKind::max_distance:
      return u.apply_scale(max_vertex_distance(q, translate(f.shape, root), u.norm));
  }
  return 0.0;
}

std::vector<std::string> validate_problem(const Problem& p) {
  std::vector<std::string> warnings;
  const Rect b = p.di.grid.bbox;
  for (std::size_t i = 0; i < p.facilities.size(); ++i) {
    const Facility& f = p.facilities[i];
    if (f.utility.scale.empty()) continue;
    // Reachable raw quantity: bounded by the bbox diagonal through the norm or
    // the gauge of the bbox corners, both measured from any root.
    double t_max = 0.0;
    const Point diag{b.width(), b.height()};
    for (Point d : {diag, Point{diag.x, -diag.y}, Point{-diag.x, diag.y}, Point{-diag.x, -diag.y}}) {
      switch (f.utility.kind) {
        case UtilityKind::norm_to_root:
          t_max = std::max(t_max, f.utility.norm(d));
          break;
        case UtilityKind::max_distance: {
          const Rect sb = f.shape.bbox();
          const Point ext{diag.x + std::max(-sb.x_lo, sb.x_hi), diag.y + std::max(-sb.y_lo, sb.y_hi)};
          t_max = std::max(t_max, f.utility.norm(ext));
          break;
        }
        case UtilityKind::gauge:
          try {
            t_max = std::max(t_max, gauge_value(f.shape, d));
          } catch (const Error&) {
          }
          break;
      }
    }
    constexpr int kSamples = 1024;
    double prev = 0.0;
    try {
      prev = f.utility.apply_scale(0.0);
      for (int s = 1; s <= kSamples; ++s) {
        const double t = t_max * s / kSamples;
        const double v = f.utility.apply_scale(t);
        if (v < prev - 1e-12 * std::max(1.0, std::fabs(prev))) {
          warnings.push_back(fmt::format(
              "facility {}: utility scale decreases near t = {:.6g}", i, t));
          break;
        }
        prev = v;
      }
    } catch (const Error& e) {
      warnings.push_back(fmt::format("facility {}: utility scale: {}", i, e.what()));
    }
  }
  return warnings;
}

double unit_utility(const DiscretizedInstance& di,
                    const std::vector<Facility>& facs, int i, CellIndex at,
                    CellIndex cell) {
  const int a = di.omega_index(at);
  const int c = di.omega_index(cell);
  if (c < 0)
    throw Error(Errc::invalid_argument,
                fmt::format("cell ({}, {}) is not in the cell set", cell.k, cell.l));
  const auto& fp = di.footprint(i, a);
  const Facility& f = facs[static_cast<std::size_t>(i)];
  if (std::binary_search(fp.begin(), fp.end(), c)) return -f.a;
  return utility_at(f, di.centers[static_cast<std::size_t>(a)],
                    di.centers[static_cast<std::size_t>(c)]);
}

Evaluator::Evaluator(const Problem& problem, std::size_t cache_doubles)
    : problem_(problem) {
  const std::size_t n = std::max<std::size_t>(1, problem.di.cells.size());
  capacity_ = std::max<std::size_t>(2 * static_cast<std::size_t>(problem.rho()) + 8,
                                    cache_doubles / n);
}

UtilityRow Evaluator::compute_row(int i, int at) const {
  const DiscretizedInstance& di = problem_.di;
  const Facility& f = problem_.facilities[static_cast<std::size_t>(i)];
  const Point root = di.centers[static_cast<std::size_t>(at)];
  auto row = std::make_shared<std::vector<double>>(di.cells.size());
  for (std::size_t c = 0; c < di.cells.size(); ++c)
    (*row)[c] = utility_at(f, root, di.centers[c]);
  for (int c : di.footprint(i, at)) (*row)[static_cast<std::size_t>(c)] = -f.a;
  return row;
}

UtilityRow Evaluator::row(int i, int at) const {
  const std::uint64_t key =
      (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(at);
  {
    std::lock_guard lock(mutex_);
    auto it = rows_.find(key);
    if (it != rows_.end()) {
      ++hits_;
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    ++misses_;
  }
  // Computed outside the lock; a concurrent duplicate computation yields the
  // same values and the first insertion wins.
  UtilityRow r = compute_row(i, at);
  std::lock_guard lock(mutex_);
  auto it = rows_.find(key);
  if (it != rows_.end()) return it->second.first;
  lru_.push_front(key);
  rows_.emplace(key, std::make_pair(r, lru_.begin()));
  while (rows_.size() > capacity_) {
    rows_.erase(lru_.back());
    lru_.pop_back();
  }
  return r;
}

std::uint64_t Evaluator::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::uint64_t Evaluator::cache_misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

Allocation Evaluator::allocate(const std::vector<int>& at) const {
  const DiscretizedInstance& di = problem_.di;
  const std::size_t n = di.cells.size();
  const std::size_t rho = at.size();
  Allocation al;
  al.owner.assign(n, -1);
  al.covered.assign(n, 0);
  al.assigned_mass.assign(rho, 0.0);
  al.install_mass.assign(rho, 0.0);

  for (std::size_t i = 0; i < rho; ++i)
    for (int c : di.footprint(static_cast<int>(i), at[i])) {
      al.owner[static_cast<std::size_t>(c)] = static_cast<int>(i);
      al.covered[static_cast<std::size_t>(c)] = 1;
    }

  std::vector<UtilityRow> rows(rho);
  for (std::size_t i = 0; i < rho; ++i) rows[i] = row(static_cast<int>(i), at[i]);

  for (std::size_t c = 0; c < n; ++c) {
    if (al.covered[c]) continue;
    const double w = di.wD[c];
    int best = 0;
    double best_key = assignment_key(problem_.facilities[0].a, w, (*rows[0])[c]);
    for (std::size_t i = 1; i < rho; ++i) {
      const double key = assignment_key(problem_.facilities[i].a, w, (*rows[i])[c]);
      if (key < best_key) {
        best_key = key;
        best = static_cast<int>(i);
      }
    }
    al.owner[c] = best;
  }

  for (std::size_t c = 0; c < n; ++c) {
    const auto i = static_cast<std::size_t>(al.owner[c]);
    if (al.covered[c]) {
      al.lost_mass += di.wD[c];
      al.install_mass[i] += di.wB[c];
    } else {
      al.assigned_mass[i] += di.wD[c];
    }
  }
  return al;
}

Evaluation Evaluator::score(Allocation alloc) const {
  Evaluation ev;
  const std::size_t rho = alloc.assigned_mass.size();
  ev.install.resize(rho);
  ev.congestion.resize(rho);
  double total = 0.0;
  for (std::size_t i = 0; i < rho; ++i) {
    const Facility& f = problem_.facilities[i];
    ev.install[i] = f.install_cost(alloc.install_mass[i]);
    ev.congestion[i] = f.congestion_cost(alloc.assigned_mass[i]);
  }
  ev.lost = problem_.lost_cost(alloc.lost_mass);
  for (std::size_t i = 0; i < rho; ++i) total += ev.install[i];
  for (std::size_t i = 0; i < rho; ++i) total += ev.congestion[i];
  total += ev.lost;
  ev.total = total;
  ev.allocation = std::move(alloc);
  return ev;
}

Allocation Evaluator::solve_lower_level(const Placement& p) const {
  return allocate(placement_omega(problem_.di, p));
}

Evaluation Evaluator::objective(const Placement& p) const {
  return score(allocate(placement_omega(problem_.di, p)));
}

double Evaluator::total(const std::vector<int>& at) const {
  return score(allocate(at)).total;
}

}  // namespace dimfac
