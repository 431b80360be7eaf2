// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"

#include "dimfac/config.hpp"
#include "dimfac/error.hpp"
#include "dimfac/exact.hpp"
#include "dimfac/grasp.hpp"
#include "dimfac/milp.hpp"
#include "dimfac/parallel.hpp"

using namespace fixtures;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string config_path(const std::string& name) {
  const char* env = std::getenv("DIMFAC_CONFIGS");
  return std::string(env && *env ? env : DIMFAC_SOURCE_CONFIGS) + "/" + name;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// A suitable placement by rejection over feasible cells, then by wavefront.
std::optional<Placement> random_suitable(const Problem& p, Rng& rng) {
  const int rho = p.rho();
  for (int i = 0; i < rho; ++i)
    if (p.di.facilities[static_cast<std::size_t>(i)].feasible.empty()) return std::nullopt;
  Placement pl(static_cast<std::size_t>(rho));
  for (int tries = 0; tries < 400; ++tries) {
    for (int i = 0; i < rho; ++i) {
      const auto& f = p.di.facilities[static_cast<std::size_t>(i)].feasible;
      pl[static_cast<std::size_t>(i)] = p.di.cells[static_cast<std::size_t>(f[rng.below(f.size())])];
    }
    if (placement_is_suitable(p.di, pl)) return pl;
  }
  std::vector<Point> roots;
  for (int i = 0; i < rho; ++i) roots.push_back(random_feasible_point(p.di, i, rng));
  try {
    return wavefront_construct(p.di, roots, GraspParams{}, rng);
  } catch (const Error&) {
    return std::nullopt;
  }
}

double key(const Problem& p, const Evaluator& ev, const std::vector<int>& at, int i, int c) {
  return assignment_key(p.facilities[static_cast<std::size_t>(i)].a, p.di.wD[static_cast<std::size_t>(c)],
                        (*ev.row(i, at[static_cast<std::size_t>(i)]))[static_cast<std::size_t>(c)]);
}

// ---------------------------------------------------------------------------

Outcome lower_level_optimality() {
  int instances = 0, skipped = 0, sampled = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 1; instances < 200; ++seed) {
    const int nx = 4 + static_cast<int>(seed % 9);
    const int ny = 4 + static_cast<int>((seed * 7) % 9);
    const int rho = 1 + static_cast<int>(seed % 3);
    const Problem p = random_problem(seed, nx, ny, rho);
    Rng rng(mix_seed(seed, 1));
    const auto pl = random_suitable(p, rng);
    if (!pl) {
      ++skipped;
      continue;
    }
    ++instances;
    const Evaluator ev(p);
    const Allocation al = ev.solve_lower_level(*pl);
    const std::vector<int> at = placement_omega(p.di, *pl);

    std::vector<int> free_cells;
    for (int c = 0; c < p.di.size(); ++c)
      if (!al.covered[static_cast<std::size_t>(c)]) free_cells.push_back(c);

    // Exchange inequality on every free cell.
    for (int c : free_cells) {
      const int i = al.owner[static_cast<std::size_t>(c)];
      const double ki = key(p, ev, at, i, c);
      for (int j = 0; j < rho; ++j)
        if (j != i && !(ki <= key(p, ev, at, j, c))) {
          if (violations++ == 0) first = fmt::format("seed {}: exchange fails at cell {} ({} vs {})", seed, c, i, j);
        }
    }

    // Exhaustive assignment of up to 12 free cells, the rest held at the
    // solver's choice (their contribution is common to every candidate).
    std::vector<int> pick = free_cells;
    if (pick.size() > 12) {
      rng.shuffle(pick);
      pick.resize(12);
      std::sort(pick.begin(), pick.end());
      ++sampled;
    }
    std::vector<std::vector<double>> k(pick.size(), std::vector<double>(static_cast<std::size_t>(rho)));
    for (std::size_t n = 0; n < pick.size(); ++n)
      for (int i = 0; i < rho; ++i) k[n][static_cast<std::size_t>(i)] = key(p, ev, at, i, pick[n]);
    double solver = 0.0;
    for (std::size_t n = 0; n < pick.size(); ++n)
      solver += k[n][static_cast<std::size_t>(al.owner[static_cast<std::size_t>(pick[n])])];
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, double)> dfs = [&](std::size_t n, double acc) {
      if (n == pick.size()) {
        best = std::min(best, acc);
        return;
      }
      for (int i = 0; i < rho; ++i) dfs(n + 1, acc + k[n][static_cast<std::size_t>(i)]);
    };
    dfs(0, 0.0);
    if (best != solver) {
      if (violations++ == 0) first = fmt::format("seed {}: enumeration {} < solver {}", seed, best, solver);
    }
  }
  return {violations == 0,
          fmt::format("{} instances ({} sampled to 12 cells, {} seeds without a placement), {} violations{}",
                      instances, sampled, skipped, violations, first.empty() ? "" : "; first: " + first)};
}

Outcome exact_vs_grasp() {
  int equal = 0, below = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Problem p = random_problem(seed, 8, 8, 2);
    const Evaluator ev(p);
    const ExactResult ex = enumerate_exact(ev, kDefaultExactLimit, 0);
    GraspParams g;
    g.seed = seed;
    const GraspResult gr = grasp_solve(ev, g);
    if (gr.evaluation.total < ex.evaluation.total) {
      if (below++ == 0) first = fmt::format("seed {}: grasp {} < exact {}", seed, gr.evaluation.total, ex.evaluation.total);
    }
    if (std::fabs(gr.evaluation.total - ex.evaluation.total) <= 1e-9) ++equal;
  }
  return {below == 0 && equal * 10 >= 30 * 7,
          fmt::format("30 seeds, grasp optimal on {} ({:.0f}%), below exact on {}{}", equal, 100.0 * equal / 30, below,
                      first.empty() ? "" : "; " + first)};
}

Outcome mass_conservation() {
  int evaluations = 0, bad = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Problem p = random_problem(seed + 1000, 4 + static_cast<int>(seed % 9), 4 + static_cast<int>(seed % 7),
                                     1 + static_cast<int>(seed % 3));
    const Evaluator ev(p);
    const double total = sum(p.di.wD);
    Rng rng(seed);
    for (int t = 0; t < 10; ++t) {
      const auto pl = random_suitable(p, rng);
      if (!pl) break;
      const Evaluation e = ev.objective(*pl);
      const double err = std::fabs(sum(e.allocation.assigned_mass) + e.allocation.lost_mass - total);
      worst = std::max(worst, err);
      ++evaluations;
      if (err > 1e-12) ++bad;
    }
  }
  std::string norms;
  bool unit_ok = true;
  for (const char* name : {"uniform.json", "example1_1.json", "refine.json"}) {
    const Problem p = build_problem(load_config(config_path(name)), 0);
    const double m = sum(p.di.wD);
    unit_ok = unit_ok && std::fabs(m - 1.0) <= 1e-9;
    norms += fmt::format(" {}={:.15g}", name, m);
  }
  return {bad == 0 && evaluations >= 500 && unit_ok,
          fmt::format("{} evaluations, worst imbalance {:.3g}, {} over 1e-12; unit masses:{}", evaluations, worst, bad,
                      norms)};
}

Outcome geometry_invariants() {
  Rng rng(4242);
  std::vector<std::pair<std::string, Shape>> shapes{
      {"square", square(0.3)},
      {"triangle", Shape::polygon({{-0.1, -0.1}, {0.2, -0.1}, {-0.1, 0.2}})},
      {"pentagon", Shape::polygon({{0, 0.08},
                                   {-0.0760845213036123, 0.0247213595499958},
                                   {-0.0470228201833979, -0.0647213595499958},
                                   {0.0470228201833979, -0.0647213595499958},
                                   {0.0760845213036123, 0.0247213595499958}})},
      {"ellipse", Shape::ellipse(1 / std::sqrt(75.0), 1 / std::sqrt(150.0))},
      {"random1", random_polygon(rng, 0.05, 0.2)},
      {"random2", random_polygon(rng, 0.02, 0.3)},
  };
  double worst_h = 0.0, worst_b = 0.0;
  for (const auto& [name, s] : shapes) {
    for (int n = 0; n < 10000; ++n) {
      Point v{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      const double t = rng.uniform(0.1, 10.0);
      worst_h = std::max(worst_h, std::fabs(gauge_value(s, {t * v.x, t * v.y}) - t * gauge_value(s, v)));
      Point b;
      if (s.kind() == ShapeKind::ellipse) {
        const double th = rng.uniform(0, 2 * std::numbers::pi);
        b = {s.semi_x() * std::cos(th), s.semi_y() * std::sin(th)};
      } else {
        const auto& vs = s.poly().vertices();
        const std::size_t e = rng.below(vs.size());
        const Point p0 = vs[e], p1 = vs[(e + 1) % vs.size()];
        const double u = rng.uniform01();
        b = {p0.x + u * (p1.x - p0.x), p0.y + u * (p1.y - p0.y)};
      }
      worst_b = std::max(worst_b, std::fabs(gauge_value(s, b) - 1.0));
    }
  }

  double worst_t = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Facility f = facility(random_polygon(rng, 0.03, 0.15), 0.1, random_utility(rng));
    const Point root{rng.uniform(0, 1), rng.uniform(0, 1)};
    const Point q{rng.uniform(0, 1), rng.uniform(0, 1)};
    const Point t{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    worst_t = std::max(worst_t, std::fabs(utility_at(f, root + t, q + t) - utility_at(f, root, q)));
  }

  int mvd_mismatch = 0;
  const std::vector<Norm> norms{Norm::l1(), Norm::l2(), Norm::linf(), Norm::weighted_l2(75, 150)};
  for (int n = 0; n < 10000; ++n) {
    const Shape s = random_polygon(rng, 0.02, 0.3);
    const Point root{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Point q{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Norm& nm = norms[rng.below(norms.size())];
    double brute = 0.0;
    for (const Point& v : s.poly().vertices()) brute = std::max(brute, norm_distance(q, root + v, nm));
    if (max_vertex_distance(q, translate(s, root), nm) != brute) ++mvd_mismatch;
  }
  return {worst_h <= 1e-9 && worst_b <= 1e-9 && worst_t <= 1e-12 && mvd_mismatch == 0,
          fmt::format("homogeneity {:.3g}, boundary {:.3g} over {} shapes x 1e4; translation {:.3g}; "
                      "max_vertex_distance mismatches {}/10000",
                      worst_h, worst_b, shapes.size(), worst_t, mvd_mismatch)};
}

Outcome wavefront_soundness() {
  std::vector<std::pair<std::string, Problem>> fx;
  fx.emplace_back("random 12x12 rho 3", random_problem(101, 12, 12, 3));
  fx.emplace_back("random 16x16 rho 3", random_problem(102, 16, 16, 3));
  fx.emplace_back("random 20x20 rho 4", random_problem(103, 20, 20, 4, 0.03, 0.08));
  fx.emplace_back("refine 20x20", build_problem(load_config(config_path("refine.json")), 0));
  fx.emplace_back("example1_1 20x20", build_problem(load_config(config_path("example1_1.json")), 0));
  int runs = 0, suitable = 0, failures = 0, bad = 0;
  std::string first;
  for (std::size_t f = 0; f < fx.size(); ++f) {
    const DiscretizedInstance& di = fx[f].second.di;
    for (int r = 0; r < 100; ++r) {
      ++runs;
      Rng rng(mix_seed(7000 + f, static_cast<std::uint64_t>(r)));
      std::vector<Point> roots;
      for (int i = 0; i < di.rho(); ++i) roots.push_back(random_feasible_point(di, i, rng));
      try {
        const Placement p = wavefront_construct(di, roots, GraspParams{}, rng);
        if (placement_is_suitable(di, p)) {
          ++suitable;
        } else if (bad++ == 0) {
          first = fmt::format("{} run {}: {}", fx[f].first, r, check_placement(di, p).message());
        }
      } catch (const Error& e) {
        if (e.code() == Errc::construction_failure) {
          ++failures;
        } else if (bad++ == 0) {
          first = fmt::format("{} run {}: unexpected error {}", fx[f].first, r, e.what());
        }
      }
    }
  }
  return {bad == 0 && runs == 500,
          fmt::format("{} runs over {} fixtures: {} suitable, {} construction_failure, {} unsound{}", runs, fx.size(),
                      suitable, failures, bad, first.empty() ? "" : "; first: " + first)};
}

// Counts implied by the model definition, computed without the builder.
MilpCounts predicted_counts(const Problem& p) {
  const DiscretizedInstance& di = p.di;
  const std::size_t n = static_cast<std::size_t>(di.size());
  const std::size_t rho = static_cast<std::size_t>(di.rho());
  MilpCounts c;
  std::size_t theta = 0;
  for (const auto& f : di.facilities) theta += f.feasible.size();
  c.variables = theta + rho * n + n + 1;
  c.binaries = theta + rho * n;
  c.rows_by_tag = {{"A3", rho}, {"A4", n}, {"A5", rho * n}, {"A6L", rho * n}, {"A6U", rho * n}};
  const double total_d = sum(di.wD);
  auto block = [&](const PiecewiseLinear& f, double reach) {
    std::vector<Breakpoint> pts = f.points();
    if (pts.front().omega > 0.0) pts.insert(pts.begin(), Breakpoint{0.0, pts.front().value});
    const double hi = pts.back().omega;
    if (reach > hi + 1e-9 * std::max(1.0, std::fabs(hi))) pts.push_back({reach, pts.back().value});
    const std::size_t segs = pts.size() - 1;
    std::vector<double> slope;
    for (std::size_t s = 0; s < segs; ++s)
      slope.push_back((pts[s + 1].value - pts[s].value) / (pts[s + 1].omega - pts[s].omega));
    const bool affine = std::all_of(slope.begin(), slope.end(), [&](double v) { return v == slope[0]; });
    const bool convex = std::is_sorted(slope.begin(), slope.end());
    c.rows_by_tag["X"] += 1;
    c.variables += 1;
    if (affine) return;
    if (convex) {
      c.variables += 1;
      c.rows_by_tag["E"] += segs;
      return;
    }
    c.variables += 3 * segs;
    c.binaries += segs;
    c.rows_by_tag["W"] += segs;
    c.rows_by_tag["S"] += 1;
    c.rows_by_tag["V"] += 1;
  };
  for (std::size_t i = 0; i < rho; ++i) {
    double reach = 0.0;
    for (std::size_t pos = 0; pos < di.facilities[i].feasible.size(); ++pos) {
      double m = 0.0;
      for (int cell : di.facilities[i].footprint[pos]) m += di.wB[static_cast<std::size_t>(cell)];
      reach = std::max(reach, m);
    }
    block(p.facilities[i].install_cost, reach);
  }
  for (std::size_t i = 0; i < rho; ++i) block(p.facilities[i].congestion_cost, total_d);
  block(p.lost_cost, total_d);
  for (const auto& [tag, k] : c.rows_by_tag) c.constraints += k;
  return c;
}

double brute_big_m(const Problem& p) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.rho(); ++i)
    for (int at : p.di.facilities[static_cast<std::size_t>(i)].feasible)
      for (int c = 0; c < p.di.size(); ++c)
        m = std::max(m, unit_utility(p.di, p.facilities, i, p.di.cells[static_cast<std::size_t>(at)],
                                     p.di.cells[static_cast<std::size_t>(c)]));
  return m;
}

Outcome milp_fidelity() {
  std::vector<std::string> notes;
  bool ok = true;

  // Model objective at fixed placements.
  double worst = 0.0;
  int checked = 0;
  for (const char* name : {"grid8.json", "refine.json"}) {
    InstanceConfig cfg = load_config(config_path(name));
    if (cfg.nx > 10) cfg.nx = cfg.ny = 10;
    const Problem p = build_problem(cfg, 0);
    const Evaluator ev(p);
    const MilpModel m = build_milp(ev);
    Rng rng(mix_seed(606, static_cast<std::uint64_t>(checked)));
    int here = 0;
    for (int t = 0; t < 2000 && here < 50; ++t) {
      const auto pl = random_suitable(p, rng);
      if (!pl) continue;
      const double a = evaluate_model_at_placement(m, p.di, *pl);
      const double b = ev.objective(*pl).total;
      worst = std::max(worst, std::fabs(a - b));
      ++here;
    }
    ok = ok && here == 50;
    checked += here;
  }
  ok = ok && worst <= 1e-9;
  notes.push_back(fmt::format("model vs objective on {} placements, worst {:.3g}", checked, worst));

  // LP round trip counts.
  for (const char* name : {"two_by_two.json", "grid8.json"}) {
    const Problem p = build_problem(load_config(config_path(name)), 0);
    const Evaluator ev(p);
    const MilpModel m = build_milp(ev);
    std::stringstream ss;
    write_lp(m, ss);
    const MilpModel back = read_lp(ss);
    const MilpCounts want = predicted_counts(p);
    const MilpCounts got = count_model(back);
    const bool same = got == want && count_model(m) == want;
    ok = ok && same;
    notes.push_back(fmt::format("{}: {} vars {} bin {} rows {}", name, got.variables, got.binaries, got.constraints,
                                same ? "as predicted" : fmt::format("but predicted {} {} {}", want.variables,
                                                                    want.binaries, want.constraints)));
  }

  // Big-M against the brute-force utility table.
  for (const char* name : {"two_by_two.json", "grid8.json", "uniform.json"}) {
    const Problem p = build_problem(load_config(config_path(name)), 0);
    const Evaluator ev(p);
    const double got = compute_big_m(ev, 0);
    const double want = brute_big_m(p);
    ok = ok && got == want;
    notes.push_back(fmt::format("{} big-M {} {}", name, got, got == want ? "==" : "!=", want));
  }
  std::string detail;
  for (const auto& s : notes) detail += (detail.empty() ? "" : "; ") + s;
  return {ok, detail};
}

Outcome refinement() {
  InstanceConfig cfg = load_config(config_path("refine.json"));
  std::vector<double> totals;
  for (int n : {10, 20, 40}) {
    cfg.nx = cfg.ny = n;
    const Problem p = build_problem(cfg, 0);
    const Evaluator ev(p);
    totals.push_back(grasp_solve(ev, cfg.grasp).evaluation.total);
  }
  const double d1 = std::fabs(totals[0] - totals[1]);
  const double d2 = std::fabs(totals[1] - totals[2]);
  const bool shrink = d2 <= d1 + 0.05 * totals[2];
  const double rel = d2 / totals[2];
  return {shrink && rel < 0.10,
          fmt::format("totals 10/20/40: {:.9f} {:.9f} {:.9f}; |t20-t40| {:.4g} vs bound {:.4g}; relative {:.2f}%",
                      totals[0], totals[1], totals[2], d2, d1 + 0.05 * totals[2], 100 * rel)};
}

Outcome determinism() {
  const int many = std::max(4, default_threads());
  std::vector<std::string> notes;
  bool ok = true;

  const InstanceConfig cfg = load_config(config_path("grid8.json"));
  const Problem p = build_problem(cfg, 1);
  const Problem q = build_problem(cfg, many);
  ok = ok && p.di.wD == q.di.wD && p.di.wB == q.di.wB;
  const Problem r = random_problem(55, 12, 12, 3, 0.03, 0.12, many);

  auto record = [&](const Problem& pb, const InstanceConfig& c, int threads) {
    const Evaluator ev(pb);
    GraspParams g = c.grasp;
    g.threads = threads;
    const GraspResult gr = grasp_solve(ev, g);
    return dump_record(make_record(c, pb, "grasp", g.seed, gr.placement, gr.evaluation));
  };
  const std::string a = record(p, cfg, 1), b = record(q, cfg, many), c = record(p, cfg, many);
  const bool grasp_same = a == b && b == c;
  ok = ok && grasp_same;

  InstanceConfig rc = cfg;
  rc.grasp.seed = 99;
  const std::string ra = record(r, rc, 1), rb = record(r, rc, many);
  ok = ok && ra == rb;
  notes.push_back(fmt::format("grasp records 1 vs {} threads {}", many, grasp_same && ra == rb ? "identical" : "DIFFER"));

  const ExactResult e1 = enumerate_exact(Evaluator(p), kDefaultExactLimit, 1);
  const ExactResult e2 = enumerate_exact(Evaluator(p), kDefaultExactLimit, many);
  ok = ok && e1.placement == e2.placement && e1.evaluation.total == e2.evaluation.total;

  int wave_diff = 0, maximin_diff = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto wave = [&] {
      Rng rng(s);
      std::vector<Point> roots;
      for (int i = 0; i < r.rho(); ++i) roots.push_back(random_feasible_point(r.di, i, rng));
      WaveStats st;
      try {
        const Placement pl = wavefront_construct(r.di, roots, GraspParams{}, rng, &st);
        std::string o = fmt::format("{} {}", st.restarts, st.growth_rounds);
        for (Point q : roots) o += fmt::format(" ({:a},{:a})", q.x, q.y);
        for (CellIndex ci : pl) o += fmt::format(" ({},{})", ci.k, ci.l);
        return o;
      } catch (const Error& e) {
        return std::string(e.what());
      }
    };
    if (wave() != wave()) ++wave_diff;
    auto maximin = [&] {
      Rng rng(s);
      std::vector<Point> others{random_feasible_point(r.di, 1, rng), random_feasible_point(r.di, 2, rng)};
      const Point start = random_feasible_point(r.di, 0, rng);
      const Point x = local_maximin_relocate(r.di, 0, others, start, GraspParams{}, rng);
      return std::pair{x.x, x.y};
    };
    if (maximin() != maximin()) ++maximin_diff;
  }
  ok = ok && wave_diff == 0 && maximin_diff == 0;
  notes.push_back(fmt::format("exact 1 vs {} threads {}", many, e1.placement == e2.placement ? "identical" : "DIFFER"));
  notes.push_back(fmt::format("wavefront repeats differing {}/50, maximin {}/50", wave_diff, maximin_diff));
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "lower-level optimality", 60, lower_level_optimality},
      {2, "exact vs GRASP", 300, exact_vs_grasp},
      {3, "mass conservation and normalization", 0, mass_conservation},
      {4, "geometry invariants", 0, geometry_invariants},
      {5, "wavefront soundness", 0, wavefront_soundness},
      {6, "MILP export fidelity", 0, milp_fidelity},
      {7, "grid refinement stabilization", 600, refinement},
      {8, "determinism across thread counts", 0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.limit_seconds > 0 && dt >= c.limit_seconds) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s limit", c.limit_seconds);
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  return failed;
}
