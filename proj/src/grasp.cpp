// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/grasp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dimfac/error.hpp"
#include "dimfac/parallel.hpp"

namespace dimfac {

void GraspParams::validate() const {
  auto bad = [](const std::string& what) { throw Error(Errc::invalid_argument, what); };
  if (psi < 1) bad("psi must be >= 1");
  if (varpi < 2 || varpi > std::max(2, psi)) bad("varpi must lie in [2, psi]");
  if (!(lambda > 0.0 && lambda < 1.0)) bad("lambda must lie in (0, 1)");
  const double inv = 1.0 / lambda;
  if (std::fabs(inv - std::round(inv)) > 1e-9 * inv) bad("1/lambda must be an integer");
  if (!(vartheta > 0.0) || !std::isfinite(vartheta)) bad("vartheta must be > 0");
  if (upsilon1 < 1 || upsilon2 < 1) bad("upsilon1 and upsilon2 must be >= 1");
  if (delta_k < 1 || delta_l < 1) bad("delta_k and delta_l must be >= 1");
  if (epsilon_ball < 0.0 || !std::isfinite(epsilon_ball)) bad("epsilon_ball must be > 0");
  if (max_outer < 0) bad("max_outer must be >= 1");
  if (restart_cap < 0) bad("restart_cap must be >= 0");
  if (slot_attempts < 1) bad("slot_attempts must be >= 1");
  if (threads < 0) bad("threads must be >= 0");
}

int GraspParams::growth_steps() const {
  return static_cast<int>(std::lround(1.0 / lambda));
}

namespace {

double l1(Point a, Point b) { return std::fabs(a.x - b.x) + std::fabs(a.y - b.y); }
double l2(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double ball_radius(const DiscretizedInstance& di, const GraspParams& params) {
  return params.epsilon_ball > 0.0 ? params.epsilon_ball
                                   : 2.0 * std::max(di.grid.hx(), di.grid.hy());
}

int resolve_threads(int t) { return t > 0 ? t : default_threads(); }

}  // namespace

bool in_feasible_region(const DiscretizedInstance& di, int i, Point q) {
  const auto c = di.grid.cell_of(q);
  return c && di.feasible(i, di.omega_index(*c));
}

Point l1_project(const DiscretizedInstance& di, int i, Point q) {
  if (in_feasible_region(di, i, q)) return q;
  // Clamp into each cell shrunk by a small margin so the result lands in the
  // half-open cell it was clamped to.
  const double mx = 1e-7 * di.grid.hx(), my = 1e-7 * di.grid.hy();
  Point best = q;
  double best_d = std::numeric_limits<double>::infinity();
  for (int o : di.facilities[static_cast<std::size_t>(i)].feasible) {
    const Rect r = di.grid.cell_rect(di.cells[static_cast<std::size_t>(o)]);
    const Point c{std::clamp(q.x, r.x_lo + mx, r.x_hi - mx),
                  std::clamp(q.y, r.y_lo + my, r.y_hi - my)};
    const double d = l1(c, q);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (!std::isfinite(best_d))
    throw Error(Errc::infeasible, fmt::format("facility {} has no feasible cell", i));
  return best;
}

Point random_feasible_point(const DiscretizedInstance& di, int i, Rng& rng) {
  const auto& feas = di.facilities[static_cast<std::size_t>(i)].feasible;
  if (feas.empty())
    throw Error(Errc::infeasible, fmt::format("facility {} has no feasible cell", i));
  Rect box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int o : feas) {
    const Rect r = di.grid.cell_rect(di.cells[static_cast<std::size_t>(o)]);
    box.x_lo = std::min(box.x_lo, r.x_lo);
    box.x_hi = std::max(box.x_hi, r.x_hi);
    box.y_lo = std::min(box.y_lo, r.y_lo);
    box.y_hi = std::max(box.y_hi, r.y_hi);
  }
  for (int t = 0; t < 10000; ++t) {
    const Point q{rng.uniform(box.x_lo, box.x_hi), rng.uniform(box.y_lo, box.y_hi)};
    if (in_feasible_region(di, i, q)) return q;
  }
  return di.centers[static_cast<std::size_t>(feas[rng.below(feas.size())])];
}

Point local_maximin_relocate(const DiscretizedInstance& di, int i,
                             const std::vector<Point>& others, Point start,
                             const GraspParams& params, Rng& rng) {
  if (others.empty())
    throw Error(Errc::invalid_argument, "local_maximin_relocate needs at least one other point");
  auto f = [&](Point q) {
    double m = std::numeric_limits<double>::infinity();
    for (Point o : others) m = std::min(m, l2(q, o));
    return m;
  };

  Point p = l1_project(di, i, start);
  double fp = f(p);
  const double f0 = fp;
  double step = 4.0 * std::max(di.grid.hx(), di.grid.hy());
  const Point dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int level = 0; level <= 6; ++level, step *= 0.5) {
    for (int it = 0; it < 10000; ++it) {
      Point best = p;
      double fb = fp;
      for (Point d : dirs) {
        const Point t = l1_project(di, i, p + step * d);
        const double ft = f(t);
        if (ft > fb) {
          fb = ft;
          best = t;
        }
      }
      if (!(fb > fp)) break;
      p = best;
      fp = fb;
    }
  }

  // Uniform point of the l1 ball around q*: rotate a uniform square by 45
  // degrees. Samples that would lose ground against the start are redrawn.
  const double eps = ball_radius(di, params);
  for (int t = 0; t < 64; ++t) {
    const double s = rng.uniform(-1.0, 1.0), u = rng.uniform(-1.0, 1.0);
    const Point c = l1_project(di, i, p + Point{0.5 * eps * (s + u), 0.5 * eps * (s - u)});
    if (f(c) >= f0) return c;
  }
  return p;
}

namespace {

struct Pair {
  int i;
  int j;
};

class Wavefront {
 public:
  Wavefront(const DiscretizedInstance& di, const GraspParams& params, Rng& rng)
      : di_(di), params_(params), rng_(rng), rho_(di.rho()),
        threshold_(3.0 * (di.grid.hx() + di.grid.hy())) {}

  Placement run(std::vector<Point> q, WaveStats& stats) {
    q_ = std::move(q);
    for (int i = 0; i < rho_; ++i) q_[static_cast<std::size_t>(i)] = l1_project(di_, i, q_[static_cast<std::size_t>(i)]);
    order_.resize(static_cast<std::size_t>(rho_));
    for (int i = 0; i < rho_; ++i) order_[static_cast<std::size_t>(i)] = i;
    const int n_steps = params_.growth_steps();

    for (;;) {
      // STEP 1: every copy at the smallest size.
      int s = 1;
      std::vector<Pair> bad;
      bool grown = false;
      for (;;) {
        // STEP 2. Separation is also checked at full size: the snapping margin
        // relies on it.
        scale_ = s == n_steps ? 1.0 : s * params_.lambda;
        bad = violating();
        if (bad.empty()) {
          if (s == n_steps) {
            grown = true;
            break;
          }
          ++s;
          ++stats.growth_rounds;
          continue;
        }
        if (!separate(stats)) {
          bad = violating();
          break;
        }
      }

      if (grown) {
        // STEPS 6-7: the order only affects processing, so snapping the roots
        // in facility order undoes the permutation.
        Placement p(static_cast<std::size_t>(rho_));
        for (int i = 0; i < rho_; ++i) p[static_cast<std::size_t>(i)] = *di_.grid.cell_of(q_[static_cast<std::size_t>(i)]);
        const SuitabilityReport rep = check_placement(di_, p);
        if (rep.ok()) return p;
        // Outside the margin argument (e.g. approximated ellipse outlines):
        // treat the offending pair as violating and relocate.
        bad.clear();
        if (rep.j >= 0) bad.push_back({rep.i, rep.j});
        else if (rep.i >= 0) q_[static_cast<std::size_t>(rep.i)] = random_feasible_point(di_, rep.i, rng_);
      }

      // STEP 5.
      if (stats.restarts >= params_.restart_cap)
        throw Error(Errc::construction_failure,
                    fmt::format("wavefront construction failed after {} relocations",
                                stats.restarts));
      ++stats.restarts;
      relocate(bad);
      rng_.shuffle(order_);
    }
  }

 private:
  PlacedShape shrunk(int i) const {
    return PlacedShape{di_.shapes[static_cast<std::size_t>(i)], q_[static_cast<std::size_t>(i)], scale_};
  }

  bool pair_violates(int i, int j) const {
    const PlacedShape a = shrunk(i), b = shrunk(j);
    const Rect ra = a.world_bbox(), rb = b.world_bbox();
    const double gap = std::max(0.0, std::max(ra.x_lo - rb.x_hi, rb.x_lo - ra.x_hi)) +
                       std::max(0.0, std::max(ra.y_lo - rb.y_hi, rb.y_lo - ra.y_hi));
    if (gap >= threshold_) return false;
    return min_l1_shape_distance(a, b) < threshold_;
  }

  std::vector<Pair> violating() const {
    std::vector<Pair> out;
    for (int i = 0; i < rho_; ++i)
      for (int j = i + 1; j < rho_; ++j)
        if (pair_violates(i, j)) out.push_back({i, j});
    return out;
  }

  bool any_violating() const {
    for (int i = 0; i < rho_; ++i)
      for (int j = i + 1; j < rho_; ++j)
        if (pair_violates(i, j)) return true;
    return false;
  }

  // STEPS 3-4. Returns true when the copies were separated for upsilon2
  // consecutive passes (back to STEP 2), false when upsilon1 passes were
  // spent (on to STEP 5).
  bool separate(WaveStats& stats) {
    int c1 = 0, c2 = 0;
    for (;;) {
      // STEP 3.
      std::vector<Point> push(static_cast<std::size_t>(rho_), Point{0, 0});
      for (const Pair& pr : violating()) {
        const Point qi = q_[static_cast<std::size_t>(pr.i)], qj = q_[static_cast<std::size_t>(pr.j)];
        Point d = qi - qj;
        double n = std::hypot(d.x, d.y);
        if (n == 0.0) {
          const double th = rng_.uniform(0.0, 2.0 * std::numbers::pi);
          d = {std::cos(th), std::sin(th)};
          n = 1.0;
        }
        d = (1.0 / n) * d;
        push[static_cast<std::size_t>(pr.i)] = push[static_cast<std::size_t>(pr.i)] + d;
        push[static_cast<std::size_t>(pr.j)] = push[static_cast<std::size_t>(pr.j)] - d;
      }
      // STEP 4, repeated with the same directions while separated.
      for (;;) {
        for (int i : order_) {
          const Point v = push[static_cast<std::size_t>(i)];
          const double n = std::hypot(v.x, v.y);
          if (n == 0.0) continue;
          const Point cand = q_[static_cast<std::size_t>(i)] + (params_.vartheta / n) * v;
          if (in_feasible_region(di_, i, cand)) {
            q_[static_cast<std::size_t>(i)] = cand;
            ++stats.separation_moves;
          }
        }
        ++c1;
        if (any_violating()) {
          if (c1 >= params_.upsilon1) return false;
          c2 = 0;
          break;
        }
        if (++c2 >= params_.upsilon2) return true;
      }
    }
  }

  void relocate(const std::vector<Pair>& bad) {
    std::vector<int> pos(static_cast<std::size_t>(rho_));
    for (int p = 0; p < rho_; ++p) pos[static_cast<std::size_t>(order_[static_cast<std::size_t>(p)])] = p;
    for (int p = 0; p < rho_; ++p) {
      const int i = order_[static_cast<std::size_t>(p)];
      std::vector<Point> others;
      for (const Pair& pr : bad) {
        const int j = pr.i == i ? pr.j : pr.j == i ? pr.i : -1;
        if (j >= 0 && pos[static_cast<std::size_t>(j)] > p) others.push_back(q_[static_cast<std::size_t>(j)]);
      }
      if (others.empty()) continue;
      q_[static_cast<std::size_t>(i)] =
          local_maximin_relocate(di_, i, others, q_[static_cast<std::size_t>(i)], params_, rng_);
    }
  }

  const DiscretizedInstance& di_;
  const GraspParams& params_;
  Rng& rng_;
  int rho_;
  double threshold_;
  double scale_ = 1.0;
  std::vector<Point> q_;
  std::vector<int> order_;
};

}  // namespace

Placement wavefront_construct(const DiscretizedInstance& di,
                              const std::vector<Point>& roots,
                              const GraspParams& params, Rng& rng,
                              WaveStats* stats) {
  params.validate();
  if (static_cast<int>(roots.size()) != di.rho())
    throw Error(Errc::invalid_argument,
                fmt::format("expected {} roots, got {}", di.rho(), roots.size()));
  WaveStats local;
  WaveStats& st = stats ? *stats : local;
  st = {};
  return Wavefront(di, params, rng).run(roots, st);
}

GreedyResult greedy_improve(const Evaluator& ev, const Placement& p,
                            const GraspParams& params, int threads) {
  const DiscretizedInstance& di = ev.problem().di;
  std::vector<int> at = placement_omega(di, p);
  const int nthreads = resolve_threads(threads >= 0 ? threads : params.threads);
  const std::size_t rho = at.size();

  GreedyResult res;
  double cur = ev.total(at);
  ++res.evaluations;
  struct Move {
    std::size_t i;
    int omega;
  };
  std::vector<int> occ(di.cells.size());
  std::vector<Move> moves;
  std::vector<double> totals;
  for (;;) {
    moves.clear();
    for (std::size_t i = 0; i < rho; ++i) {
      std::fill(occ.begin(), occ.end(), 0);
      for (std::size_t j = 0; j < rho; ++j)
        if (j != i)
          for (int c : di.footprint(static_cast<int>(j), at[j])) occ[static_cast<std::size_t>(c)] = 1;
      const CellIndex c0 = di.cells[static_cast<std::size_t>(at[i])];
      for (int jk = -params.delta_k; jk <= params.delta_k; ++jk)
        for (int jl = -params.delta_l; jl <= params.delta_l; ++jl) {
          if (jk == 0 && jl == 0) continue;
          const int o = di.omega_index({c0.k + jk, c0.l + jl});
          if (!di.feasible(static_cast<int>(i), o)) continue;
          bool clash = false;
          for (int c : di.footprint(static_cast<int>(i), o))
            if (occ[static_cast<std::size_t>(c)]) {
              clash = true;
              break;
            }
          if (!clash) moves.push_back({i, o});
        }
    }
    totals.assign(moves.size(), 0.0);
    parallel_for(moves.size(), nthreads, [&](std::size_t m) {
      std::vector<int> trial = at;
      trial[moves[m].i] = moves[m].omega;
      totals[m] = ev.total(trial);
    });
    res.evaluations += moves.size();

    // Strict improvement; the first of equal totals has the lowest
    // (i, jk, jl).
    std::ptrdiff_t best = -1;
    double best_total = cur;
    for (std::size_t m = 0; m < moves.size(); ++m)
      if (totals[m] < best_total) {
        best_total = totals[m];
        best = static_cast<std::ptrdiff_t>(m);
      }
    if (best < 0) break;
    at[moves[static_cast<std::size_t>(best)].i] = moves[static_cast<std::size_t>(best)].omega;
    cur = best_total;
    ++res.iterations;
  }

  res.placement.resize(rho);
  for (std::size_t i = 0; i < rho; ++i) res.placement[i] = di.cells[static_cast<std::size_t>(at[i])];
  res.total = cur;
  return res;
}

namespace {

bool entry_less(const GraspEntry& a, const GraspEntry& b) {
  if (a.total != b.total) return a.total < b.total;
  return a.placement < b.placement;
}

}  // namespace

GraspResult grasp_solve(const Evaluator& ev, const GraspParams& params) {
  params.validate();
  const DiscretizedInstance& di = ev.problem().di;
  const int rho = di.rho();
  const int threads = resolve_threads(params.threads);
  const int max_outer = params.max_outer > 0 ? params.max_outer : 10 * params.psi;

  GraspResult res;

  // STEP 1. Each slot draws from its own stream so the list does not depend
  // on the thread count.
  const auto psi = static_cast<std::size_t>(params.psi);
  std::vector<std::optional<GraspEntry>> slots(psi);
  std::vector<int> slot_restarts(psi, 0);
  std::vector<std::uint64_t> slot_evals(psi, 0);
  parallel_for(psi, threads, [&](std::size_t j) {
    Rng rng(mix_seed(params.seed, j));
    for (int attempt = 0; attempt < params.slot_attempts; ++attempt) {
      std::vector<Point> roots(static_cast<std::size_t>(rho));
      for (int i = 0; i < rho; ++i) roots[static_cast<std::size_t>(i)] = random_feasible_point(di, i, rng);
      WaveStats st;
      try {
        const Placement p = wavefront_construct(di, roots, params, rng, &st);
        slot_restarts[j] += st.restarts;
        const GreedyResult g = greedy_improve(ev, p, params, 1);
        slot_evals[j] += g.evaluations;
        slots[j] = GraspEntry{g.placement, g.total};
        return;
      } catch (const Error& e) {
        if (e.code() != Errc::construction_failure) throw;
        slot_restarts[j] += st.restarts;
      }
    }
  });

  std::vector<GraspEntry> list;
  for (std::size_t j = 0; j < psi; ++j) {
    res.wave_restarts += slot_restarts[j];
    res.evaluations += slot_evals[j];
    if (slots[j]) list.push_back(std::move(*slots[j]));
    else ++res.failed_slots;
  }
  if (list.empty())
    throw Error(Errc::construction_failure,
                fmt::format("no suitable placement found after {} wavefront attempts",
                            params.psi * params.slot_attempts));
  std::stable_sort(list.begin(), list.end(), entry_less);
  res.best_initial = list.front().total;

  // STEP 2.
  Rng rng(mix_seed(params.seed, psi));
  const int width = std::min(params.varpi, rho);
  std::size_t j = 0;
  bool improved = false;
  while (res.outer_visits < max_outer) {
    const GraspEntry entry = list[j];
    std::vector<Point> roots(static_cast<std::size_t>(rho));
    for (int i = 0; i < rho; ++i)
      roots[static_cast<std::size_t>(i)] = cell_center(di.grid, entry.placement[static_cast<std::size_t>(i)]);
    if (width >= 2) {
      std::vector<int> idx(static_cast<std::size_t>(rho));
      for (int i = 0; i < rho; ++i) idx[static_cast<std::size_t>(i)] = i;
      rng.shuffle(idx);
      idx.resize(static_cast<std::size_t>(width));
      std::vector<int> perm(static_cast<std::size_t>(width));
      do {
        for (int a = 0; a < width; ++a) perm[static_cast<std::size_t>(a)] = a;
        rng.shuffle(perm);
      } while (std::is_sorted(perm.begin(), perm.end()));
      const std::vector<Point> old = roots;
      for (int a = 0; a < width; ++a)
        roots[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])] =
            old[static_cast<std::size_t>(idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])])];
    }
    for (int i = 0; i < rho; ++i)
      roots[static_cast<std::size_t>(i)] = l1_project(di, i, roots[static_cast<std::size_t>(i)]);

    std::optional<GraspEntry> cand;
    WaveStats st;
    try {
      const Placement p = wavefront_construct(di, roots, params, rng, &st);
      const GreedyResult g = greedy_improve(ev, p, params, threads);
      res.evaluations += g.evaluations;
      cand = GraspEntry{g.placement, g.total};
    } catch (const Error& e) {
      if (e.code() != Errc::construction_failure) throw;
    }
    res.wave_restarts += st.restarts;
    ++res.outer_visits;

    if (cand && cand->total < list.back().total &&
        std::none_of(list.begin(), list.end(),
                     [&](const GraspEntry& x) { return x.placement == cand->placement; })) {
      list.back() = std::move(*cand);
      std::stable_sort(list.begin(), list.end(), entry_less);
      improved = true;
      ++res.improvements;
    }
    if (++j >= list.size()) {
      if (!improved) break;
      j = 0;
      improved = false;
    }
  }

  res.placement = list.front().placement;
  res.evaluation = ev.objective(res.placement);
  res.list = std::move(list);
  return res;
}

}  // namespace dimfac
