// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Uniform grid discretization of the demand region: the cell set, centers,
// density weights, feasible placement cells and facility footprints.

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "dimfac/expr.hpp"
#include "dimfac/geometry.hpp"

namespace dimfac {

struct CellIndex {
  int k = 0;
  int l = 0;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

using Placement = std::vector<CellIndex>;

struct Grid {
  Rect bbox;
  int nx = 1;
  int ny = 1;

  double hx() const { return bbox.width() / nx; }
  double hy() const { return bbox.height() / ny; }
  bool in_range(CellIndex c) const {
    return c.k >= 0 && c.k < nx && c.l >= 0 && c.l < ny;
  }
  Rect cell_rect(CellIndex c) const;
  // Half-open cell containing p; points on the far bbox edges belong to the
  // last row/column. Empty when p is outside the closed bbox.
  std::optional<CellIndex> cell_of(Point p) const;

  // Throws invalid_argument on non-positive counts or an empty bbox.
  void validate() const;
};

Point cell_center(const Grid& g, CellIndex c);

// Cells whose open interior meets the open region, k-major then l.
std::vector<CellIndex> build_cells(const Polygon& region, const Grid& g,
                                   double eps);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Tensor Gauss-Legendre integral of density(x, y) over the closed cell.
double cell_weight(const Grid& g, CellIndex c, const Expr& density, int order);

// Cells of `cells` at whose centers the shape fits inside the region.
std::vector<CellIndex> facility_feasible_cells(const Polygon& region,
                                               const Grid& g,
                                               const std::vector<CellIndex>& cells,
                                               const Shape& shape, double eps);

// Cells of `cells` whose interiors meet the shape interior when the shape is
// rooted at the center of `at`. Sorted in cell order. Scans the shape bbox
// inflated by one cell.
std::vector<CellIndex> facility_footprint(const Grid& g,
                                          const std::vector<CellIndex>& cells,
                                          const Shape& shape, CellIndex at,
                                          double eps);

struct FacilityCells {
  std::vector<int> feasible;      // omega indices, ascending
  std::vector<int> feasible_pos;  // omega index -> position in feasible, or -1
  std::vector<std::vector<int>> footprint;  // per feasible position, ascending
};

struct DiscretizeOptions {
  int quadrature_order = 4;
  double eps = 1e-9;
  int threads = 0;
  bool use_stencil_cache = true;
};

class DiscretizedInstance {
 public:
  Polygon region;
  Grid grid;
  double eps = 1e-9;
  std::vector<Shape> shapes;

  std::vector<CellIndex> cells;  // the set Omega
  std::vector<int> lookup;       // k * ny + l -> omega index, or -1
  std::vector<Point> centers;
  std::vector<double> wD;
  std::vector<double> wB;
  std::vector<FacilityCells> facilities;

  int rho() const { return static_cast<int>(facilities.size()); }
  int size() const { return static_cast<int>(cells.size()); }
  int omega_index(CellIndex c) const {
    return grid.in_range(c) ? lookup[static_cast<std::size_t>(c.k * grid.ny + c.l)]
                            : -1;
  }
  bool feasible(int i, int omega) const {
    return omega >= 0 &&
           facilities[static_cast<std::size_t>(i)]
                   .feasible_pos[static_cast<std::size_t>(omega)] >= 0;
  }
  // Footprint of facility i placed at omega cell `at`; `at` must be feasible.
  const std::vector<int>& footprint(int i, int at) const;
};

DiscretizedInstance discretize(const Polygon& region, const Grid& g,
                               const Expr& demand, const Expr& base,
                               std::vector<Shape> shapes,
                               const DiscretizeOptions& opt = {});

enum class Violation { none, out_of_range, infeasible_cell, overlap, wrong_size };

struct SuitabilityReport {
  Violation violation = Violation::none;
  int i = -1;
  int j = -1;
  bool ok() const { return violation == Violation::none; }
  std::string message() const;
};

SuitabilityReport check_placement(const DiscretizedInstance& di,
                                  const Placement& p);

inline bool placement_is_suitable(const DiscretizedInstance& di,
                                  const Placement& p) {
  return check_placement(di, p).ok();
}

// Omega indices of a suitable placement. Throws unsuitable otherwise.
std::vector<int> placement_omega(const DiscretizedInstance& di,
                                 const Placement& p);

}  // namespace dimfac
