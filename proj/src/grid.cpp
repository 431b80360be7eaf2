// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "dimfac/error.hpp"
#include "dimfac/parallel.hpp"

namespace dimfac {

namespace {

bool open_rects_disjoint(const Rect& a, const Rect& b) {
  return a.x_hi <= b.x_lo || a.x_lo >= b.x_hi || a.y_hi <= b.y_lo ||
         a.y_lo >= b.y_hi;
}

// Footprint over the unrestricted grid, as omega-free cell indices.
std::vector<CellIndex> scan_footprint(const Grid& g, const PlacedShape& ps,
                                      double eps) {
  const Rect b = ps.world_bbox();
  const double hx = g.hx(), hy = g.hy();
  const int k_lo = std::max(0, static_cast<int>(std::floor((b.x_lo - g.bbox.x_lo) / hx)) - 1);
  const int k_hi = std::min(g.nx - 1, static_cast<int>(std::floor((b.x_hi - g.bbox.x_lo) / hx)) + 1);
  const int l_lo = std::max(0, static_cast<int>(std::floor((b.y_lo - g.bbox.y_lo) / hy)) - 1);
  const int l_hi = std::min(g.ny - 1, static_cast<int>(std::floor((b.y_hi - g.bbox.y_lo) / hy)) + 1);
  std::vector<CellIndex> out;
  for (int k = k_lo; k <= k_hi; ++k)
    for (int l = l_lo; l <= l_hi; ++l) {
      const CellIndex c{k, l};
      if (interior_intersects_rect(ps, g.cell_rect(c), eps)) out.push_back(c);
    }
  return out;
}

// Offsets of the footprint for a placement far from the grid border, or empty
// when the grid is too small to have such a placement.
struct Stencil {
  int reach = 0;
  std::vector<CellIndex> offsets;
  bool usable = false;
};

Stencil make_stencil(const Grid& g, const Shape& s, double eps) {
  Stencil st;
  const Rect b = s.bbox();
  const double span = std::max({std::fabs(b.x_lo) / g.hx(), std::fabs(b.x_hi) / g.hx(),
                                std::fabs(b.y_lo) / g.hy(), std::fabs(b.y_hi) / g.hy()});
  st.reach = static_cast<int>(std::ceil(span)) + 2;
  const CellIndex ref{g.nx / 2, g.ny / 2};
  if (ref.k - st.reach < 0 || ref.k + st.reach >= g.nx || ref.l - st.reach < 0 ||
      ref.l + st.reach >= g.ny)
    return st;
  for (const CellIndex& c : scan_footprint(g, translate(s, cell_center(g, ref)), eps))
    st.offsets.push_back({c.k - ref.k, c.l - ref.l});
  st.usable = true;
  return st;
}

}  // namespace

Rect Grid::cell_rect(CellIndex c) const {
  const double w = bbox.width(), h = bbox.height();
  return {bbox.x_lo + w * c.k / nx, bbox.x_lo + w * (c.k + 1) / nx,
          bbox.y_lo + h * c.l / ny, bbox.y_lo + h * (c.l + 1) / ny};
}

std::optional<CellIndex> Grid::cell_of(Point p) const {
  if (!(p.x >= bbox.x_lo && p.x <= bbox.x_hi && p.y >= bbox.y_lo &&
        p.y <= bbox.y_hi))
    return std::nullopt;
  int k = static_cast<int>(std::floor((p.x - bbox.x_lo) / hx()));
  int l = static_cast<int>(std::floor((p.y - bbox.y_lo) / hy()));
  k = std::clamp(k, 0, nx - 1);
  l = std::clamp(l, 0, ny - 1);
  // Floor of the quotient can land one cell off near grid lines.
  const Rect r = cell_rect({k, l});
  if (p.x < r.x_lo && k > 0) --k;
  if (p.x >= r.x_hi && k < nx - 1) ++k;
  if (p.y < r.y_lo && l > 0) --l;
  if (p.y >= r.y_hi && l < ny - 1) ++l;
  return CellIndex{k, l};
}

void Grid::validate() const {
  if (nx <= 0 || ny <= 0)
    throw Error(Errc::invalid_argument,
                fmt::format("grid needs positive cell counts, got {}x{}", nx, ny));
  if (!(bbox.x_lo < bbox.x_hi && bbox.y_lo < bbox.y_hi) ||
      !std::isfinite(bbox.width()) || !std::isfinite(bbox.height()))
    throw Error(Errc::invalid_argument, "grid bbox is empty or not finite");
}

Point cell_center(const Grid& g, CellIndex c) {
  const Rect r = g.cell_rect(c);
  return {0.5 * (r.x_lo + r.x_hi), 0.5 * (r.y_lo + r.y_hi)};
}

std::vector<CellIndex> build_cells(const Polygon& region, const Grid& g,
                                   double eps) {
  g.validate();
  std::vector<CellIndex> out;
  const Rect rb = region.bbox();
  for (int k = 0; k < g.nx; ++k)
    for (int l = 0; l < g.ny; ++l) {
      const Rect r = g.cell_rect({k, l});
      if (open_rects_disjoint(r, rb)) continue;
      if (clipped_area(region.vertices(), r) > eps * std::max(r.width(), r.height()))
        out.push_back({k, l});
    }
  if (out.empty())
    throw Error(Errc::infeasible, "no grid cell meets the region interior");
  return out;
}

void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (order < 1)
    throw Error(Errc::invalid_argument,
                fmt::format("quadrature order must be >= 1, got {}", order));
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / dp;
      if (std::fabs(z - z1) <= 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -z;
    nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

namespace {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const Rule& rule_for(int order) {
  static std::mutex m;
  static std::map<int, Rule> cache;
  std::lock_guard lock(m);
  auto it = cache.find(order);
  if (it == cache.end()) {
    Rule r;
    gauss_legendre(order, r.nodes, r.weights);
    it = cache.emplace(order, std::move(r)).first;
  }
  return it->second;
}

}  // namespace

double cell_weight(const Grid& g, CellIndex c, const Expr& density, int order) {
  const Rule& rule = rule_for(order);
  const Rect r = g.cell_rect(c);
  const double cx = 0.5 * (r.x_lo + r.x_hi), cy = 0.5 * (r.y_lo + r.y_hi);
  const double ax = 0.5 * r.width(), ay = 0.5 * r.height();
  double sum = 0.0;
  try {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double row = 0.0;
      const double x = cx + ax * rule.nodes[i];
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double xy[2] = {x, cy + ay * rule.nodes[j]};
        row += rule.weights[j] * density.evaluate(xy);
      }
      sum += rule.weights[i] * row;
    }
  } catch (const Error& e) {
    throw Error(e.code(),
                fmt::format("density at cell ({}, {}): {}", c.k, c.l, e.what()));
  }
  return ax * ay * sum;
}

std::vector<CellIndex> facility_feasible_cells(const Polygon& region,
                                               const Grid& g,
                                               const std::vector<CellIndex>& cells,
                                               const Shape& shape, double eps) {
  std::vector<CellIndex> out;
  for (const CellIndex& c : cells)
    if (shape_inside_polygon(translate(shape, cell_center(g, c)), region, eps))
      out.push_back(c);
  return out;
}

std::vector<CellIndex> facility_footprint(const Grid& g,
                                          const std::vector<CellIndex>& cells,
                                          const Shape& shape, CellIndex at,
                                          double eps) {
  std::vector<CellIndex> out;
  for (const CellIndex& c : scan_footprint(g, translate(shape, cell_center(g, at)), eps))
    if (std::binary_search(cells.begin(), cells.end(), c)) out.push_back(c);
  return out;
}

const std::vector<int>& DiscretizedInstance::footprint(int i, int at) const {
  const FacilityCells& f = facilities[static_cast<std::size_t>(i)];
  const int pos = f.feasible_pos[static_cast<std::size_t>(at)];
  if (pos < 0)
    throw Error(Errc::unsuitable,
                fmt::format("cell {} is not a feasible placement for facility {}",
                            at, i));
  return f.footprint[static_cast<std::size_t>(pos)];
}

DiscretizedInstance discretize(const Polygon& region, const Grid& g,
                               const Expr& demand, const Expr& base,
                               std::vector<Shape> shapes,
                               const DiscretizeOptions& opt) {
  if (shapes.empty())
    throw Error(Errc::invalid_argument, "at least one facility is required");
  DiscretizedInstance di;
  di.region = region;
  di.grid = g;
  di.eps = opt.eps;
  di.shapes = std::move(shapes);
  di.cells = build_cells(region, g, opt.eps);

  const std::size_t n = di.cells.size();
  di.lookup.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny), -1);
  di.centers.resize(n);
  for (std::size_t o = 0; o < n; ++o) {
    const CellIndex c = di.cells[o];
    di.lookup[static_cast<std::size_t>(c.k * g.ny + c.l)] = static_cast<int>(o);
    di.centers[o] = cell_center(g, c);
  }

  di.wD.assign(n, 0.0);
  di.wB.assign(n, 0.0);
  parallel_for(n, opt.threads, [&](std::size_t o) {
    di.wD[o] = cell_weight(g, di.cells[o], demand, opt.quadrature_order);
    di.wB[o] = cell_weight(g, di.cells[o], base, opt.quadrature_order);
  });
  for (std::size_t o = 0; o < n; ++o) {
    for (const auto& [w, name] : {std::pair{di.wD[o], "demand"}, std::pair{di.wB[o], "base"}})
      if (!std::isfinite(w) || w < 0.0)
        throw Error(Errc::domain,
                    fmt::format("{} weight of cell ({}, {}) is {}", name,
                                di.cells[o].k, di.cells[o].l, w));
  }

  di.facilities.resize(di.shapes.size());
  for (std::size_t i = 0; i < di.shapes.size(); ++i) {
    const Shape& shape = di.shapes[i];
    FacilityCells& f = di.facilities[i];
    std::vector<char> ok(n, 0);
    parallel_for(n, opt.threads, [&](std::size_t o) {
      ok[o] = shape_inside_polygon(translate(shape, di.centers[o]), region, opt.eps);
    });
    f.feasible_pos.assign(n, -1);
    for (std::size_t o = 0; o < n; ++o)
      if (ok[o]) {
        f.feasible_pos[o] = static_cast<int>(f.feasible.size());
        f.feasible.push_back(static_cast<int>(o));
      }

    Stencil st;
    if (opt.use_stencil_cache) st = make_stencil(g, shape, opt.eps);
    f.footprint.resize(f.feasible.size());
    parallel_for(f.feasible.size(), opt.threads, [&](std::size_t p) {
      const CellIndex at = di.cells[static_cast<std::size_t>(f.feasible[p])];
      std::vector<int>& fp = f.footprint[p];
      const bool interior = st.usable && at.k - st.reach >= 0 &&
                            at.k + st.reach < g.nx && at.l - st.reach >= 0 &&
                            at.l + st.reach < g.ny;
      if (interior) {
        for (const CellIndex& d : st.offsets) {
          const int o = di.omega_index({at.k + d.k, at.l + d.l});
          if (o >= 0) fp.push_back(o);
        }
      } else {
        for (const CellIndex& c : scan_footprint(g, translate(shape, di.centers[static_cast<std::size_t>(f.feasible[p])]), opt.eps)) {
          const int o = di.omega_index(c);
          if (o >= 0) fp.push_back(o);
        }
      }
      std::sort(fp.begin(), fp.end());
    });
  }
  return di;
}

std::string SuitabilityReport::message() const {
  switch (violation) {
    case Violation::none:
      return "suitable";
    case Violation::wrong_size:
      return "placement length does not match the number of facilities";
    case Violation::out_of_range:
      return fmt::format("facility {} is placed outside the grid", i);
    case Violation::infeasible_cell:
      return fmt::format("facility {} is placed at a cell where it does not fit "
                         "inside the region",
                         i);
    case Violation::overlap:
      return fmt::format("footprints of facilities {} and {} overlap", i, j);
  }
  return "unknown";
}

SuitabilityReport check_placement(const DiscretizedInstance& di,
                                  const Placement& p) {
  if (static_cast<int>(p.size()) != di.rho()) return {Violation::wrong_size};
  std::vector<int> at(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!di.grid.in_range(p[i])) return {Violation::out_of_range, static_cast<int>(i)};
    at[i] = di.omega_index(p[i]);
    if (!di.feasible(static_cast<int>(i), at[i]))
      return {Violation::infeasible_cell, static_cast<int>(i)};
  }
  std::vector<int> owner(static_cast<std::size_t>(di.size()), -1);
  for (std::size_t j = 0; j < p.size(); ++j)
    for (int o : di.footprint(static_cast<int>(j), at[j])) {
      int& w = owner[static_cast<std::size_t>(o)];
      if (w >= 0) return {Violation::overlap, w, static_cast<int>(j)};
      w = static_cast<int>(j);
    }
  return {};
}

std::vector<int> placement_omega(const DiscretizedInstance& di,
                                 const Placement& p) {
  const SuitabilityReport r = check_placement(di, p);
  if (!r.ok()) throw Error(Errc::unsuitable, r.message());
  std::vector<int> at(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) at[i] = di.omega_index(p[i]);
  return at;
}

}  // namespace dimfac
