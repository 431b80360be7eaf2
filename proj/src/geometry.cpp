// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dimfac/error.hpp"

namespace dimfac {

namespace {

constexpr int kEllipseSides = 64;

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

double signed_area(const std::vector<Point>& v) {
  double s = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

double point_segment_distance(Point q, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point c = a + t * ab;
  return std::hypot(q.x - c.x, q.y - c.y);
}

// Crossing-number test; boundary points may go either way.
bool crossing_inside(const std::vector<Point>& v, Point q) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = v[i];
    const Point& b = v[j];
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x) inside = !inside;
    }
  }
  return inside;
}

double boundary_distance_of(const std::vector<Point>& v, Point q) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    d = std::min(d, point_segment_distance(q, v[i], v[(i + 1) % n]));
  return d;
}

int orient(Point a, Point b, Point c) {
  const double o = cross(b - a, c - a);
  return (o > 0.0) - (o < 0.0);
}

bool on_segment(Point a, Point b, Point c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

bool segments_touch(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

Rect bbox_of(const std::vector<Point>& v) {
  Rect r{v[0].x, v[0].x, v[0].y, v[0].y};
  for (const Point& p : v) {
    r.x_lo = std::min(r.x_lo, p.x);
    r.x_hi = std::max(r.x_hi, p.x);
    r.y_lo = std::min(r.y_lo, p.y);
    r.y_hi = std::max(r.y_hi, p.y);
  }
  return r;
}

std::vector<Point> ellipse_outline(double a, double b) {
  std::vector<Point> v;
  v.reserve(kEllipseSides);
  for (int k = 0; k < kEllipseSides; ++k) {
    const double th = 2.0 * std::numbers::pi * k / kEllipseSides;
    v.push_back({a * std::cos(th), b * std::sin(th)});
  }
  return v;
}

// Minimum over the segment [p, q] of (x/a)^2 + (y/b)^2, centered frame.
double min_quadratic_on_segment(Point p, Point q, double a, double b) {
  const Point ps{p.x / a, p.y / b};
  const Point qs{q.x / a, q.y / b};
  const double d = point_segment_distance({0.0, 0.0}, ps, qs);
  return d * d;
}

}  // namespace

Norm Norm::weighted_l2(double wx, double wy) {
  if (!(std::isfinite(wx) && std::isfinite(wy) && wx > 0.0 && wy > 0.0))
    throw Error(Errc::invalid_argument,
                fmt::format("weighted norm needs positive weights, got ({}, {})",
                            wx, wy));
  return {NormKind::weighted_l2, wx, wy};
}

double Norm::operator()(Point v) const {
  switch (kind) {
    case NormKind::l1:
      return std::fabs(v.x) + std::fabs(v.y);
    case NormKind::l2:
      return std::hypot(v.x, v.y);
    case NormKind::linf:
      return std::max(std::fabs(v.x), std::fabs(v.y));
    case NormKind::weighted_l2:
      return std::sqrt(wx * v.x * v.x + wy * v.y * v.y);
  }
  return 0.0;
}

double norm_distance(Point a, Point b, const Norm& n) { return n(a - b); }

Polygon Polygon::make(std::vector<Point> v) {
  if (v.size() < 3)
    throw Error(Errc::degenerate_shape, "polygon needs at least 3 vertices");
  for (const Point& p : v)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(Errc::degenerate_shape, "polygon vertex is not finite");
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] == v[(i + 1) % n])
      throw Error(Errc::degenerate_shape,
                  fmt::format("polygon repeats vertex {}", i));

  double area = signed_area(v);
  if (area == 0.0) throw Error(Errc::degenerate_shape, "polygon has zero area");
  if (area < 0.0) {
    std::reverse(v.begin(), v.end());
    area = -area;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i], b = v[(i + 1) % n];
    // Adjacent edge folding back over this one.
    const Point c = v[(i + 2) % n];
    if (orient(a, b, c) == 0 && dot(b - a, c - b) < 0.0)
      throw Error(Errc::degenerate_shape,
                  fmt::format("polygon edge {} folds back", i));
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      if (segments_touch(a, b, v[j], v[(j + 1) % n]))
        throw Error(Errc::degenerate_shape,
                    fmt::format("polygon edges {} and {} intersect", i, j));
    }
  }

  Polygon p;
  p.area_ = area;
  p.bbox_ = bbox_of(v);
  p.convex_ = true;
  for (std::size_t i = 0; i < n; ++i)
    if (cross(v[(i + 1) % n] - v[i], v[(i + 2) % n] - v[(i + 1) % n]) < 0.0)
      p.convex_ = false;
  p.vertices_ = std::make_shared<const std::vector<Point>>(std::move(v));
  return p;
}

bool Polygon::contains(Point q, double eps) const {
  if (crossing_inside(*vertices_, q)) return true;
  return boundary_distance_of(*vertices_, q) <= eps;
}

double Polygon::boundary_distance(Point q) const {
  return boundary_distance_of(*vertices_, q);
}

Shape Shape::polygon(std::vector<Point> vertices) {
  Shape s;
  s.kind_ = ShapeKind::polygon;
  s.poly_ = std::make_shared<const Polygon>(Polygon::make(std::move(vertices)));
  if (!s.poly_->contains({0.0, 0.0}, 1e-12))
    throw Error(Errc::degenerate_shape,
                "root point (local origin) is outside the polygon");
  s.outline_ = std::make_shared<const std::vector<Point>>(s.poly_->vertices());
  return s;
}

Shape Shape::ellipse(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0))
    throw Error(Errc::degenerate_shape,
                fmt::format("ellipse semi-axes must be positive, got ({}, {})",
                            a, b));
  Shape s;
  s.kind_ = ShapeKind::ellipse;
  s.a_ = a;
  s.b_ = b;
  s.outline_ = std::make_shared<const std::vector<Point>>(ellipse_outline(a, b));
  return s;
}

const Polygon& Shape::poly() const {
  if (kind_ != ShapeKind::polygon)
    throw Error(Errc::unsupported_shape, "shape is not a polygon");
  return *poly_;
}

Rect Shape::bbox() const {
  if (kind_ == ShapeKind::ellipse) return {-a_, a_, -b_, b_};
  return poly_->bbox();
}

double Shape::area() const {
  if (kind_ == ShapeKind::ellipse) return std::numbers::pi * a_ * b_;
  return poly_->area();
}

bool operator==(const Shape& s, const Shape& t) {
  if (s.kind_ != t.kind_) return false;
  if (s.kind_ == ShapeKind::ellipse) return s.a_ == t.a_ && s.b_ == t.b_;
  return s.poly_->vertices() == t.poly_->vertices();
}

std::vector<Point> PlacedShape::world_outline() const {
  std::vector<Point> out;
  out.reserve(shape.outline().size());
  for (const Point& v : shape.outline()) out.push_back(to_world(v));
  return out;
}

Rect PlacedShape::world_bbox() const {
  const Rect b = shape.bbox();
  return {root.x + scale * b.x_lo, root.x + scale * b.x_hi,
          root.y + scale * b.y_lo, root.y + scale * b.y_hi};
}

PlacedShape translate(const Shape& s, Point root_at) {
  return PlacedShape{s, root_at, 1.0};
}

bool contains_point(const PlacedShape& p, Point q, double eps) {
  if (p.shape.kind() == ShapeKind::ellipse) {
    const double a = p.scale * p.shape.semi_x();
    const double b = p.scale * p.shape.semi_y();
    const double dx = (q.x - p.root.x) / a;
    const double dy = (q.y - p.root.y) / b;
    return dx * dx + dy * dy <= 1.0 + eps;
  }
  const std::vector<Point> w = p.world_outline();
  if (crossing_inside(w, q)) return true;
  return boundary_distance_of(w, q) <= eps;
}

bool shape_inside_polygon(const PlacedShape& p, const Polygon& region,
                          double eps) {
  const auto& rv = region.vertices();
  const std::size_t rn = rv.size();

  if (p.shape.kind() == ShapeKind::ellipse) {
    if (!region.contains(p.root, eps)) return false;
    const double a = p.scale * p.shape.semi_x();
    const double b = p.scale * p.shape.semi_y();
    // No region edge may enter the open ellipse. The tolerance is relative to
    // the quadratic form, which is 1 on the ellipse boundary.
    const double tol = eps / std::min(a, b);
    for (std::size_t i = 0; i < rn; ++i) {
      const double m = min_quadratic_on_segment(rv[i] - p.root,
                                                rv[(i + 1) % rn] - p.root, a, b);
      if (m < 1.0 - tol) return false;
    }
    return true;
  }

  const std::vector<Point> w = p.world_outline();
  const std::size_t n = w.size();
  for (const Point& v : w)
    if (!region.contains(v, eps)) return false;

  // Split each shape edge where it meets region edges; every piece must stay
  // inside. This catches edges leaving through a notch of a non-convex region.
  std::vector<double> cuts;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = w[i], b = w[(i + 1) % n];
    const Point d = b - a;
    cuts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < rn; ++j) {
      const Point c = rv[j], e = rv[(j + 1) % rn];
      const Point f = e - c;
      const double den = cross(d, f);
      if (den != 0.0) {
        const double t = cross(c - a, f) / den;
        const double u = cross(c - a, d) / den;
        if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) cuts.push_back(t);
      } else {
        const double len2 = dot(d, d);
        for (Point r : {c, e}) {
          const double t = dot(r - a, d) / len2;
          if (t > 0.0 && t < 1.0) cuts.push_back(t);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] - cuts[k] <= 0.0) continue;
      const Point mid = a + (0.5 * (cuts[k] + cuts[k + 1])) * d;
      if (!region.contains(mid, eps)) return false;
    }
  }

  for (const Point& r : rv)
    if (crossing_inside(w, r) && boundary_distance_of(w, r) > eps) return false;
  return true;
}

double clipped_area(const std::vector<Point>& polygon, const Rect& r) {
  std::vector<Point> cur = polygon;
  std::vector<Point> next;
  // Sutherland-Hodgman against the four half-planes of the rect.
  auto clip = [&](auto inside, auto intersect) {
    next.clear();
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = cur[i];
      const Point b = cur[(i + 1) % n];
      const bool ia = inside(a), ib = inside(b);
      if (ia) next.push_back(a);
      if (ia != ib) next.push_back(intersect(a, b));
    }
    cur.swap(next);
  };
  auto at_x = [](double x) {
    return [x](Point a, Point b) {
      const double t = (x - a.x) / (b.x - a.x);
      return Point{x, a.y + t * (b.y - a.y)};
    };
  };
  auto at_y = [](double y) {
    return [y](Point a, Point b) {
      const double t = (y - a.y) / (b.y - a.y);
      return Point{a.x + t * (b.x - a.x), y};
    };
  };
  clip([&](Point p) { return p.x >= r.x_lo; }, at_x(r.x_lo));
  if (cur.size() < 3) return 0.0;
  clip([&](Point p) { return p.x <= r.x_hi; }, at_x(r.x_hi));
  if (cur.size() < 3) return 0.0;
  clip([&](Point p) { return p.y >= r.y_lo; }, at_y(r.y_lo));
  if (cur.size() < 3) return 0.0;
  clip([&](Point p) { return p.y <= r.y_hi; }, at_y(r.y_hi));
  if (cur.size() < 3) return 0.0;
  return signed_area(cur);
}

bool interior_intersects_rect(const PlacedShape& p, const Rect& r, double eps) {
  const Rect b = p.world_bbox();
  if (b.x_hi <= r.x_lo || b.x_lo >= r.x_hi || b.y_hi <= r.y_lo ||
      b.y_lo >= r.y_hi)
    return false;
  if (p.shape.kind() == ShapeKind::ellipse) {
    const double a = p.scale * p.shape.semi_x();
    const double bb = p.scale * p.shape.semi_y();
    // Axis-aligned ellipse and rect: the nearest rect point in the ellipse
    // metric is the per-axis clamp of the center.
    const double cx = std::clamp(p.root.x, r.x_lo, r.x_hi);
    const double cy = std::clamp(p.root.y, r.y_lo, r.y_hi);
    const double dx = (cx - p.root.x) / a;
    const double dy = (cy - p.root.y) / bb;
    const double tol = eps / std::min(a, bb);
    return dx * dx + dy * dy < 1.0 - tol;
  }
  const double area = clipped_area(p.world_outline(), r);
  return area > eps * std::max(r.width(), r.height());
}

double gauge_value(const Shape& s, Point v) {
  if (s.kind() == ShapeKind::ellipse) {
    const double x = v.x / s.semi_x();
    const double y = v.y / s.semi_y();
    return std::sqrt(x * x + y * y);
  }
  const auto& w = s.poly().vertices();
  const std::size_t n = w.size();
  double g = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Point e = w[(j + 1) % n] - w[j];
    const Point normal{e.y, -e.x};  // outward for counter-clockwise order
    const double h = dot(normal, w[j]);
    if (h <= 1e-12 * std::hypot(normal.x, normal.y))
      throw Error(Errc::degenerate_shape,
                  "gauge needs the root point in the shape interior");
    g = std::max(g, dot(normal, v) / h);
  }
  return g;
}

double max_vertex_distance(Point q, const PlacedShape& p, const Norm& n) {
  if (p.shape.kind() != ShapeKind::polygon)
    throw Error(Errc::unsupported_shape,
                "max vertex distance is defined for polygons only");
  double m = 0.0;
  for (const Point& v : p.shape.outline()) m = std::max(m, n(q - p.to_world(v)));
  return m;
}

double l1_segment_distance(Point p0, Point p1, Point q0, Point q1) {
  // d(s,t) = c + s*u - t*v is affine, so |dx| + |dy| is convex piecewise
  // linear on [0,1]^2 and its minimum sits on a vertex of the arrangement of
  // the square with the lines dx = 0 and dy = 0.
  const Point c = p0 - q0;
  const Point u = p1 - p0;
  const Point v = q1 - q0;
  auto f = [&](double s, double t) {
    return std::fabs(c.x + s * u.x - t * v.x) + std::fabs(c.y + s * u.y - t * v.y);
  };
  double best = std::min({f(0, 0), f(0, 1), f(1, 0), f(1, 1)});
  auto consider = [&](double s, double t) {
    if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0) best = std::min(best, f(s, t));
  };
  for (double s : {0.0, 1.0}) {
    // dx = 0 and dy = 0 along the edge s fixed, solve for t.
    if (v.x != 0.0) consider(s, (c.x + s * u.x) / v.x);
    if (v.y != 0.0) consider(s, (c.y + s * u.y) / v.y);
  }
  for (double t : {0.0, 1.0}) {
    if (u.x != 0.0) consider((t * v.x - c.x) / u.x, t);
    if (u.y != 0.0) consider((t * v.y - c.y) / u.y, t);
  }
  // Interior point with dx = dy = 0: s*u - t*v = -c.
  const double det = -u.x * v.y + v.x * u.y;
  if (det != 0.0) {
    const double s = (-c.x * -v.y - -v.x * -c.y) / det;
    const double t = (u.x * -c.y - u.y * -c.x) / det;
    consider(s, t);
  }
  return best;
}

double min_l1_shape_distance(const PlacedShape& p, const PlacedShape& q) {
  const std::vector<Point> a = p.world_outline();
  const std::vector<Point> b = q.world_outline();
  for (const Point& v : a)
    if (crossing_inside(b, v)) return 0.0;
  for (const Point& v : b)
    if (crossing_inside(a, v)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t na = a.size(), nb = b.size();
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      best = std::min(best, l1_segment_distance(a[i], a[(i + 1) % na], b[j],
                                                b[(j + 1) % nb]));
  return best;
}

}  // namespace dimfac
