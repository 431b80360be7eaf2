// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Instance builders shared by the unit tests and the acceptance runner.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dimfac/costs.hpp"
#include "dimfac/evaluate.hpp"
#include "dimfac/expr.hpp"
#include "dimfac/geometry.hpp"
#include "dimfac/grid.hpp"
#include "dimfac/rng.hpp"

namespace fixtures {

using namespace dimfac;

inline const std::vector<std::string>& xy() {
  static const std::vector<std::string> v{"x", "y"};
  return v;
}

inline Polygon unit_square() { return Polygon::make({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

inline Shape square(double side) {
  const double h = side / 2;
  return Shape::polygon({{-h, -h}, {h, -h}, {h, h}, {-h, h}});
}

inline Facility facility(Shape s, double a, UtilitySpec u = {},
                         PiecewiseLinear install = PiecewiseLinear::constant(0.0),
                         PiecewiseLinear congestion = PiecewiseLinear::identity()) {
  return Facility{std::move(s), a, std::move(u), std::move(install), std::move(congestion)};
}

inline Problem make_problem(const Polygon& region, int nx, int ny,
                            const std::string& demand, const std::string& base,
                            std::vector<Facility> facs,
                            PiecewiseLinear lost = PiecewiseLinear::identity(),
                            int threads = 1) {
  Grid g{region.bbox(), nx, ny};
  std::vector<Shape> shapes;
  for (const auto& f : facs) shapes.push_back(f.shape);
  DiscretizeOptions opt;
  opt.threads = threads;
  Problem p{discretize(region, g, Expr::parse(demand, xy()), Expr::parse(base, xy()),
                       std::move(shapes), opt),
            std::move(facs), std::move(lost), {}};
  p.warnings = validate_problem(p);
  return p;
}

// The two-facility 2x2 fixture: uniform demand, two squares of side 0.1,
// L2 distance utilities, a = 1e-4 and 0.1, no installation cost, identity
// congestion and lost-demand costs.
inline Problem two_by_two() {
  return make_problem(unit_square(), 2, 2, "1", "0",
                      {facility(square(0.1), 0.0001), facility(square(0.1), 0.1)});
}

// Random convex polygon with the root strictly inside: vertices on a star of
// random radii at increasing angles.
inline Shape random_polygon(Rng& rng, double r_lo, double r_hi) {
  const int n = 3 + static_cast<int>(rng.below(4));
  std::vector<Point> v;
  const double phase = rng.uniform(0, 2 * std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    const double th = phase + 2 * std::numbers::pi * (k + rng.uniform(0.35, 0.65)) / n;
    const double r = rng.uniform(r_lo, r_hi);
    v.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return Shape::polygon(std::move(v));
}

inline PiecewiseLinear random_pl(Rng& rng, double omega_hi) {
  const int n = 2 + static_cast<int>(rng.below(3));
  std::vector<Breakpoint> pts;
  double v = rng.uniform(0, 0.2);
  for (int s = 0; s < n; ++s) {
    pts.push_back({omega_hi * s / (n - 1), v});
    v += rng.uniform(0, 1.5);
  }
  return PiecewiseLinear::make(std::move(pts));
}

inline UtilitySpec random_utility(Rng& rng) {
  UtilitySpec u;
  switch (rng.below(4)) {
    case 0:
      u.kind = UtilityKind::norm_to_root;
      u.norm = Norm::l2();
      break;
    case 1:
      u.kind = UtilityKind::norm_to_root;
      u.norm = Norm::l1();
      u.scale = Expr::parse("0.5*t", {"t"});
      break;
    case 2:
      u.kind = UtilityKind::gauge;
      u.clamped = rng.below(2) == 0;
      u.scale = Expr::parse("0.2*t", {"t"});
      break;
    default:
      u.kind = UtilityKind::max_distance;
      u.norm = Norm::linf();
      break;
  }
  return u;
}

// Random instance on the unit square with a random smooth density.
inline Problem random_problem(std::uint64_t seed, int nx, int ny, int rho,
                              double r_lo = 0.03, double r_hi = 0.12,
                              int threads = 1) {
  Rng rng(seed);
  std::vector<Facility> facs;
  for (int i = 0; i < rho; ++i) {
    // Distinct access costs.
    const double a = 0.01 + 0.05 * i + rng.uniform(0, 0.04);
    facs.push_back(facility(random_polygon(rng, r_lo, r_hi), a, random_utility(rng),
                            random_pl(rng, 0.3), random_pl(rng, 1.0)));
  }
  const double c1 = rng.uniform(0, 1), c2 = rng.uniform(0, 1);
  const std::string demand = "1 + " + std::to_string(c1) + "*(x - 0.5) + " +
                             std::to_string(c2) + "*(y - 0.5)";
  return make_problem(unit_square(), nx, ny, demand, "2*x*y", std::move(facs),
                      random_pl(rng, 1.0), threads);
}

}  // namespace fixtures
