// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include <cmath>
#include <cstring>

#include "doctest.h"
#include "dimfac/error.hpp"
#include "dimfac/grid.hpp"
#include "fixtures.hpp"

using namespace dimfac;
using fixtures::square;
using fixtures::unit_square;
using fixtures::xy;

namespace {

constexpr double kEps = 1e-9;

Grid unit_grid(int nx, int ny) { return Grid{{0, 1, 0, 1}, nx, ny}; }

}  // namespace

TEST_CASE("build_cells") {
  CHECK(build_cells(unit_square(), unit_grid(2, 2), kEps).size() == 4);
  const Polygon tri = Polygon::make({{0, 0}, {1, 0}, {0, 1}});
  const auto cells = build_cells(tri, unit_grid(2, 2), kEps);
  REQUIRE(cells.size() == 3);
  CHECK(cells == std::vector<CellIndex>{{0, 0}, {0, 1}, {1, 0}});
  // Monte-Carlo oracle: open cells with any sample strictly inside the
  // triangle.
  Rng rng(1);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      int hits = 0;
      for (int s = 0; s < 4000; ++s) {
        const double x = 0.5 * (k + rng.uniform01()), y = 0.5 * (l + rng.uniform01());
        if (x + y < 1.0) ++hits;
      }
      const bool listed = std::find(cells.begin(), cells.end(), CellIndex{k, l}) != cells.end();
      CHECK(listed == (hits > 0));
    }
  const Polygon odd = Polygon::make({{0.2, 0.3}, {0.7, 0.25}, {0.4, 0.9}});
  CHECK(build_cells(odd, Grid{odd.bbox(), 1, 1}, kEps).size() == 1);
}

TEST_CASE("cell_center") {
  CHECK(cell_center(unit_grid(2, 2), {0, 0}) == Point{0.25, 0.25});
  CHECK(cell_center(unit_grid(2, 2), {1, 1}) == Point{0.75, 0.75});
  CHECK(cell_center(Grid{{0, 2, 0, 4}, 2, 2}, {1, 0}) == Point{1.5, 1.0});
}

TEST_CASE("cell_of uses half-open cells") {
  const Grid g = unit_grid(10, 10);
  CHECK(g.cell_of({0.1, 0.0}) == CellIndex{1, 0});
  CHECK(g.cell_of({1.0, 1.0}) == CellIndex{9, 9});
  CHECK(g.cell_of({0.3, 0.7}) == CellIndex{3, 7});
  CHECK_FALSE(g.cell_of({1.01, 0.5}).has_value());
  Rng rng(3);
  for (int s = 0; s < 1000; ++s) {
    const Point p{rng.uniform01(), rng.uniform01()};
    const Rect r = g.cell_rect(*g.cell_of(p));
    CHECK(p.x >= r.x_lo);
    CHECK(p.x < r.x_hi);
    CHECK(p.y >= r.y_lo);
    CHECK(p.y < r.y_hi);
  }
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    // Exact for degree 2n - 1.
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], d);
      const double exact = d % 2 == 1 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::fabs(q - exact) <= 1e-13);
    }
  }
  std::vector<double> x, w;
  CHECK_THROWS_AS(gauss_legendre(0, x, w), Error);
}

TEST_CASE("cell_weight") {
  const Grid g{{0, 2, 0, 3}, 4, 5};
  const Expr one = Expr::parse("1", xy());
  for (int order = 1; order <= 6; ++order)
    CHECK(cell_weight(g, {1, 2}, one, order) == doctest::Approx(g.hx() * g.hy()).epsilon(1e-15));

  const Expr half = Expr::parse("if(x>=0.5, 8*(x-0.5), 0)", xy());
  const Grid u = unit_grid(2, 2);
  CHECK(cell_weight(u, {1, 0}, half, 4) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cell_weight(u, {0, 1}, half, 4) == 0.0);
  double total = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) total += cell_weight(u, {k, l}, half, 4);
  CHECK(std::fabs(total - 1.0) <= 1e-12);

  CHECK(std::fabs(cell_weight(unit_grid(1, 1), {0, 0}, Expr::parse("x*y", xy()), 2) - 0.25) <= 1e-15);

  try {
    cell_weight(u, {1, 1}, Expr::parse("sqrt(x-0.8) + 0*y", xy()), 4);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain);
    CHECK(std::string(e.what()).find("(1, 1)") != std::string::npos);
  }
}

TEST_CASE("facility_feasible_cells") {
  const Grid g = unit_grid(10, 10);
  const auto cells = build_cells(unit_square(), g, kEps);
  CHECK(facility_feasible_cells(unit_square(), g, cells, square(1e-10), kEps) == cells);

  const auto f = facility_feasible_cells(unit_square(), g, cells, square(0.6), kEps);
  std::vector<CellIndex> expect;
  for (const CellIndex& c : cells) {
    const Point q = cell_center(g, c);
    if (q.x >= 0.3 - 1e-12 && q.x <= 0.7 + 1e-12 && q.y >= 0.3 - 1e-12 && q.y <= 0.7 + 1e-12)
      expect.push_back(c);
  }
  CHECK(f == expect);
  CHECK(f.size() == 16);
  CHECK(facility_feasible_cells(unit_square(), g, cells, square(1.5), kEps).empty());
}

TEST_CASE("facility_footprint") {
  const Grid g2 = unit_grid(2, 2);
  const auto c2 = build_cells(unit_square(), g2, kEps);
  CHECK(facility_footprint(g2, c2, square(0.1), {0, 1}, kEps) == std::vector<CellIndex>{{0, 1}});

  const Grid g = unit_grid(10, 10);
  const auto cells = build_cells(unit_square(), g, kEps);
  // Side exactly one cell, aligned: only the placement cell.
  CHECK(facility_footprint(g, cells, square(0.1), {4, 4}, kEps) == std::vector<CellIndex>{{4, 4}});
  // Side two cells with edges on grid lines: a 2x2 block.
  const Shape offset = Shape::polygon({{-0.05, -0.05}, {0.15, -0.05}, {0.15, 0.15}, {-0.05, 0.15}});
  CHECK(facility_footprint(g, cells, offset, {4, 4}, kEps) ==
        std::vector<CellIndex>{{4, 4}, {4, 5}, {5, 4}, {5, 5}});
  // Side two cells centered on a cell center: the 3x3 neighborhood.
  CHECK(facility_footprint(g, cells, square(0.2), {4, 4}, kEps).size() == 9);

  // Every listed cell overlaps by Monte-Carlo; neighbors left out do not.
  const Shape tri = Shape::polygon({{-0.13, -0.08}, {0.17, -0.02}, {0.01, 0.16}});
  const auto fp = facility_footprint(g, cells, tri, {5, 5}, kEps);
  const PlacedShape ps = translate(tri, cell_center(g, {5, 5}));
  Rng rng(9);
  for (const CellIndex& c : cells) {
    const Rect r = g.cell_rect(c);
    int hits = 0;
    for (int s = 0; s < 3000; ++s)
      if (contains_point(ps, {rng.uniform(r.x_lo, r.x_hi), rng.uniform(r.y_lo, r.y_hi)}, 0.0)) ++hits;
    const bool listed = std::find(fp.begin(), fp.end(), c) != fp.end();
    CHECK(listed == (hits > 0));
  }
}

TEST_CASE("footprint stencil cache agrees with the honest scan") {
  const Polygon region = Polygon::make({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  const Grid g{region.bbox(), 24, 24};
  std::vector<Shape> shapes{square(1.0 / 12), Shape::ellipse(0.2, 0.11),
                            Shape::polygon({{-0.13, -0.08}, {0.17, -0.02}, {0.01, 0.16}}),
                            Shape::polygon({{-0.05, -0.05}, {0.25, -0.05}, {0.25, 0.05}, {-0.05, 0.05}})};
  DiscretizeOptions cached, honest;
  honest.use_stencil_cache = false;
  const Expr one = Expr::parse("1", xy());
  const auto a = discretize(region, g, one, one, shapes, cached);
  const auto b = discretize(region, g, one, one, shapes, honest);
  for (int i = 0; i < a.rho(); ++i) {
    CHECK(a.facilities[static_cast<std::size_t>(i)].feasible == b.facilities[static_cast<std::size_t>(i)].feasible);
    CHECK(a.facilities[static_cast<std::size_t>(i)].footprint == b.facilities[static_cast<std::size_t>(i)].footprint);
    // And the honest per-cell routine.
    const auto& f = a.facilities[static_cast<std::size_t>(i)];
    for (std::size_t p = 0; p < f.feasible.size(); p += 7) {
      const CellIndex at = a.cells[static_cast<std::size_t>(f.feasible[p])];
      std::vector<int> expect;
      for (const CellIndex& c : facility_footprint(g, a.cells, shapes[static_cast<std::size_t>(i)], at, a.eps))
        expect.push_back(a.omega_index(c));
      CHECK(f.footprint[p] == expect);
    }
  }
}

TEST_CASE("footprint translation covariance on interior placements") {
  const Grid g = unit_grid(20, 20);
  const auto cells = build_cells(unit_square(), g, kEps);
  const Shape tri = Shape::polygon({{-0.13, -0.08}, {0.17, -0.02}, {0.01, 0.16}});
  const auto a = facility_footprint(g, cells, tri, {8, 8}, kEps);
  const auto b = facility_footprint(g, cells, tri, {9, 7}, kEps);
  REQUIRE(a.size() == b.size());
  for (std::size_t n = 0; n < a.size(); ++n) CHECK(b[n] == CellIndex{a[n].k + 1, a[n].l - 1});
}

TEST_CASE("placement suitability") {
  const auto p = fixtures::make_problem(unit_square(), 10, 10, "1", "0",
                                        {fixtures::facility(square(0.05), 1.0),
                                         fixtures::facility(square(0.05), 2.0)});
  CHECK(placement_is_suitable(p.di, {{0, 0}, {9, 9}}));
  const auto same = check_placement(p.di, {{3, 3}, {3, 3}});
  CHECK(same.violation == Violation::overlap);
  CHECK(same.i == 0);
  CHECK(same.j == 1);
  CHECK(check_placement(p.di, {{3, 3}}).violation == Violation::wrong_size);
  CHECK(check_placement(p.di, {{3, 3}, {10, 3}}).violation == Violation::out_of_range);

  // Side exactly one cell: neighbors share only a grid line.
  const auto q = fixtures::make_problem(unit_square(), 10, 10, "1", "0",
                                        {fixtures::facility(square(0.1), 1.0),
                                         fixtures::facility(square(0.1), 2.0)});
  CHECK(q.di.footprint(0, q.di.omega_index({4, 4})) == std::vector<int>{q.di.omega_index({4, 4})});
  CHECK(placement_is_suitable(q.di, {{4, 4}, {5, 4}}));
  const auto r = fixtures::make_problem(unit_square(), 10, 10, "1", "0",
                                        {fixtures::facility(square(0.3), 1.0)});
  const auto bad = check_placement(r.di, {{0, 0}});
  CHECK(bad.violation == Violation::infeasible_cell);
  CHECK(bad.i == 0);
}

TEST_CASE("unit-mass densities sum to one") {
  const auto u = fixtures::make_problem(unit_square(), 17, 13, "1", "1", {fixtures::facility(square(0.05), 1.0)});
  double s = 0.0;
  for (double w : u.di.wD) s += w;
  CHECK(std::fabs(s - 1.0) <= 1e-9);
  for (int n : {2, 10, 20, 40}) {
    const auto h = fixtures::make_problem(unit_square(), n, n, "if(x>=0.5, 8*(x-0.5), 0)",
                                          "1", {fixtures::facility(square(0.01), 1.0)});
    double sd = 0.0;
    for (double w : h.di.wD) sd += w;
    CHECK(std::fabs(sd - 1.0) <= 1e-9);
  }
}

TEST_CASE("kinks off the grid lines converge at second order") {
  const Expr b = Expr::parse("if(x>=y, 6*(x-y), 0)", xy());
  double prev = 0.0;
  for (int n : {10, 20, 40}) {
    const Grid g = unit_grid(n, n);
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) s += cell_weight(g, {k, l}, b, 4);
    const double err = std::fabs(s - 1.0);
    CHECK(err <= 0.05 / (n * n));
    if (prev > 0.0) CHECK(err < prev / 3.0);
    prev = err;
  }
}

TEST_CASE("discretization is deterministic and thread-count independent") {
  const auto a = fixtures::random_problem(5, 16, 16, 3, 0.03, 0.12, 1);
  const auto b = fixtures::random_problem(5, 16, 16, 3, 0.03, 0.12, 4);
  CHECK(a.di.cells == b.di.cells);
  CHECK(std::memcmp(a.di.wD.data(), b.di.wD.data(), a.di.wD.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.di.wB.data(), b.di.wB.data(), a.di.wB.size() * sizeof(double)) == 0);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.di.facilities[static_cast<std::size_t>(i)].feasible == b.di.facilities[static_cast<std::size_t>(i)].feasible);
    CHECK(a.di.facilities[static_cast<std::size_t>(i)].footprint == b.di.facilities[static_cast<std::size_t>(i)].footprint);
  }
}

TEST_CASE("grid refinement keeps footprint coverage") {
  const Shape tri = Shape::polygon({{-0.13, -0.08}, {0.17, -0.02}, {0.01, 0.16}});
  const Point root{0.5, 0.5};
  for (int n : {8, 10, 16}) {
    const Grid coarse = unit_grid(n, n), fine = unit_grid(2 * n, 2 * n);
    const auto cc = build_cells(unit_square(), coarse, kEps);
    const auto cf = build_cells(unit_square(), fine, kEps);
    const auto fc = facility_footprint(coarse, cc, tri, *coarse.cell_of(root), kEps);
    const auto ff = facility_footprint(fine, cf, tri, *fine.cell_of(root), kEps);
    const double h = 1.0 / n;
    const double a_coarse = static_cast<double>(fc.size()) * h * h;
    const double a_fine = static_cast<double>(ff.size()) * h * h / 4;
    const Rect b = tri.bbox();
    const double ring = (2 * (b.width() + b.height()) + 8 * h) * h;
    CHECK(a_fine >= a_coarse - ring);
  }
}
