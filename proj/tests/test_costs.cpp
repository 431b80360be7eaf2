// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include <cmath>

#include "doctest.h"
#include "dimfac/costs.hpp"
#include "dimfac/error.hpp"
#include "dimfac/rng.hpp"

using namespace dimfac;

TEST_CASE("evaluation") {
  CHECK(pl_eval(PiecewiseLinear::identity(), 0.5) == 0.5);

  const double aleph = 1.0 / 6.0;
  const auto c = PiecewiseLinear::make({{0, 0}, {aleph, aleph}, {1, aleph + 100 * (1 - aleph)}});
  CHECK(c(aleph) == aleph);
  CHECK(std::fabs(c(0.2) - (aleph + 100 * (0.2 - aleph))) <= 1e-12);

  const auto f = PiecewiseLinear::make({{0, 1}, {0.3, 2.5}, {0.7, 2.5}, {1, 9}});
  for (const auto& b : f.points()) CHECK(f(b.omega) == b.value);
  CHECK(f(-1.0) == 1.0);
  CHECK(f(5.0) == 9.0);
  CHECK(f(0.5) == 2.5);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(PiecewiseLinear::make({{0, 0}}), Error);
  CHECK_THROWS_AS(PiecewiseLinear::make({{0, 0}, {0, 1}}), Error);
  try {
    PiecewiseLinear::make({{0, 0}, {0.5, 1}, {1, 0.5}});
    FAIL("expected monotonicity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::monotonicity);
    CHECK(std::string(e.what()).find("[0.5, 1]") != std::string::npos);
  }
  try {
    PiecewiseLinear::make({{0, -1}, {1, 0}});
    FAIL("expected negativity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::negativity);
  }
}

TEST_CASE("pl_from_expr") {
  const std::vector<std::string> t{"t"};
  CHECK(pl_from_expr(Expr::parse("t", t), {0, 1}).points() == std::vector<Breakpoint>{{0, 0}, {1, 1}});
  CHECK(pl_from_expr(Expr::parse("t*t", t), {0, 0.5, 1}).points() ==
        std::vector<Breakpoint>{{0, 0}, {0.5, 0.25}, {1, 1}});
  try {
    pl_from_expr(Expr::parse("-t", t), {0, 1});
    FAIL("expected monotonicity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::monotonicity);
  }
  CHECK_THROWS_AS(pl_from_expr(Expr::parse("t", t), {0}), Error);
}

TEST_CASE("shape predicates") {
  CHECK(PiecewiseLinear::identity().is_affine());
  CHECK(PiecewiseLinear::make({{0, 0}, {0.5, 0.5}, {1, 1}}).is_affine());
  const double aleph = 1.0 / 6.0;
  const auto c = PiecewiseLinear::make({{0, 0}, {aleph, aleph}, {1, aleph + 100 * (1 - aleph)}});
  CHECK_FALSE(c.is_affine());
  CHECK(c.is_convex());
  CHECK_FALSE(PiecewiseLinear::make({{0, 0}, {0.5, 1}, {1, 1}}).is_convex());
}

TEST_CASE("evaluation is continuous and non-decreasing") {
  Rng rng(41);
  for (int n = 0; n < 50; ++n) {
    std::vector<Breakpoint> pts;
    double w = 0.0, v = 0.0;
    for (int s = 0; s < 6; ++s) {
      pts.push_back({w, v});
      w += rng.uniform(0.01, 0.5);
      v += rng.below(3) == 0 ? 0.0 : rng.uniform(0, 2);
    }
    const auto f = PiecewiseLinear::make(pts);
    for (int s = 0; s < 200; ++s) {
      const double a = rng.uniform(-0.5, w + 0.5), b = rng.uniform(-0.5, w + 0.5);
      CHECK(f(std::min(a, b)) <= f(std::max(a, b)));
    }
    // Continuity at breakpoints.
    for (const auto& b : pts) {
      CHECK(std::fabs(f(b.omega - 1e-12) - b.value) <= 1e-9);
      CHECK(std::fabs(f(b.omega + 1e-12) - b.value) <= 1e-9);
    }
  }
}

TEST_CASE("interpolation error shrinks with refinement") {
  const std::vector<std::string> t{"t"};
  // Lipschitz constant 3 on [0, 1].
  const Expr f = Expr::parse("min(t, 0.3) + t*t", t);
  const double lip = 3.0;
  for (int n : {2, 3, 5, 9, 17, 33, 65}) {
    std::vector<double> om;
    for (int s = 0; s < n; ++s) om.push_back(static_cast<double>(s) / (n - 1));
    const auto pl = pl_from_expr(f, om);
    double err = 0.0;
    for (int s = 0; s <= 4000; ++s) {
      const double x[1] = {s / 4000.0};
      err = std::max(err, std::fabs(f.evaluate(x) - pl(x[0])));
    }
    CHECK(err <= lip / (n - 1));
  }
}
