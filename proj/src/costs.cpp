// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/costs.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dimfac/error.hpp"

namespace dimfac {

PiecewiseLinear PiecewiseLinear::make(std::vector<Breakpoint> points) {
  if (points.size() < 2)
    throw Error(Errc::invalid_argument,
                "piecewise-linear cost needs at least 2 breakpoints");
  for (std::size_t s = 0; s < points.size(); ++s) {
    const Breakpoint& b = points[s];
    if (!std::isfinite(b.omega) || !std::isfinite(b.value))
      throw Error(Errc::invalid_argument,
                  fmt::format("breakpoint {} is not finite", s));
    if (s > 0) {
      const Breakpoint& a = points[s - 1];
      if (!(b.omega > a.omega))
        throw Error(Errc::invalid_argument,
                    fmt::format("breakpoint omegas must increase strictly at "
                                "index {} ({} after {})",
                                s, b.omega, a.omega));
      if (b.value < a.value)
        throw Error(Errc::monotonicity,
                    fmt::format("cost decreases on [{}, {}] ({} -> {})",
                                a.omega, b.omega, a.value, b.value));
    }
    if (b.value < 0.0)
      throw Error(Errc::negativity,
                  fmt::format("cost value {} at omega {} is negative", b.value,
                              b.omega));
  }
  PiecewiseLinear f;
  f.points_ = std::move(points);
  return f;
}

PiecewiseLinear PiecewiseLinear::constant(double value) {
  return make({{0.0, value}, {1.0, value}});
}

PiecewiseLinear PiecewiseLinear::identity() { return make({{0.0, 0.0}, {1.0, 1.0}}); }

double PiecewiseLinear::operator()(double omega) const {
  const auto& p = points_;
  if (omega <= p.front().omega) return p.front().value;
  if (omega >= p.back().omega) return p.back().value;
  // First breakpoint with omega > x; the bracket is [it-1, it].
  auto it = std::upper_bound(p.begin(), p.end(), omega,
                             [](double x, const Breakpoint& b) { return x < b.omega; });
  const Breakpoint& a = *(it - 1);
  const Breakpoint& b = *it;
  if (omega == a.omega) return a.value;
  const double t = (omega - a.omega) / (b.omega - a.omega);
  return a.value + t * (b.value - a.value);
}

double PiecewiseLinear::slope(std::size_t s) const {
  const Breakpoint& a = points_[s];
  const Breakpoint& b = points_[s + 1];
  return (b.value - a.value) / (b.omega - a.omega);
}

bool PiecewiseLinear::is_affine() const {
  // Compare through cross products to avoid division round-off.
  const Breakpoint& a = points_[0];
  const Breakpoint& b = points_[1];
  for (std::size_t s = 2; s < points_.size(); ++s) {
    const Breakpoint& c = points_[s];
    const double lhs = (b.value - a.value) * (c.omega - a.omega);
    const double rhs = (c.value - a.value) * (b.omega - a.omega);
    if (std::fabs(lhs - rhs) > 1e-12 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)}))
      return false;
  }
  return true;
}

bool PiecewiseLinear::is_convex() const {
  for (std::size_t s = 1; s < segments(); ++s)
    if (slope(s) < slope(s - 1) - 1e-12 * std::max(1.0, std::fabs(slope(s - 1))))
      return false;
  return true;
}

PiecewiseLinear pl_from_expr(const Expr& f, const std::vector<double>& omegas) {
  if (omegas.size() < 2)
    throw Error(Errc::invalid_argument, "need at least 2 sample points");
  std::vector<Breakpoint> pts;
  pts.reserve(omegas.size());
  for (double w : omegas) {
    const double t[1] = {w};
    pts.push_back({w, f.evaluate(t)});
  }
  return PiecewiseLinear::make(std::move(pts));
}

}  // namespace dimfac
