// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#pragma once

#include <vector>

#include "dimfac/expr.hpp"

namespace dimfac {

struct Breakpoint {
  double omega = 0.0;
  double value = 0.0;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

// Non-decreasing, non-negative piecewise-linear cost. Outside the breakpoint
// range it is constant at the end values.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  // Validates: >= 2 points, finite, omegas strictly increasing, values
  // non-decreasing (monotonicity) and >= 0 (negativity).
  static PiecewiseLinear make(std::vector<Breakpoint> points);
  static PiecewiseLinear constant(double value);  // over [0, 1]
  static PiecewiseLinear identity();              // (0,0), (1,1)

  const std::vector<Breakpoint>& points() const { return points_; }
  double operator()(double omega) const;

  // Slope of segment s (between points s and s+1).
  double slope(std::size_t s) const;
  std::size_t segments() const { return points_.size() - 1; }

  // Single slope across all segments.
  bool is_affine() const;
  // Slopes non-decreasing.
  bool is_convex() const;

  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

 private:
  std::vector<Breakpoint> points_;
};

inline double pl_eval(const PiecewiseLinear& f, double omega) { return f(omega); }

// Samples f(t) at `omegas` and validates the result.
PiecewiseLinear pl_from_expr(const Expr& f, const std::vector<double>& omegas);

}  // namespace dimfac
