// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Planar primitives. Facilities are translated (never rotated) copies of a
// shape whose root point is the shape-local origin. Closed tests treat
// grazing contact as containment; interior tests treat it as no overlap.

#pragma once

#include <memory>
#include <vector>

namespace dimfac {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

struct Rect {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class NormKind { l1, l2, linf, weighted_l2 };

struct Norm {
  NormKind kind = NormKind::l2;
  double wx = 1.0;  // weighted_l2 only
  double wy = 1.0;

  static Norm l1() { return {NormKind::l1}; }
  static Norm l2() { return {NormKind::l2}; }
  static Norm linf() { return {NormKind::linf}; }
  // Throws invalid_argument unless both weights are finite and positive.
  static Norm weighted_l2(double wx, double wy);

  double operator()(Point v) const;
  friend bool operator==(const Norm&, const Norm&) = default;
};

double norm_distance(Point a, Point b, const Norm& n);

// A simple polygon with positive area, stored counter-clockwise. The factory
// reverses clockwise input and rejects fewer than three vertices, repeated
// consecutive vertices, self-intersections and zero area.
class Polygon {
 public:
  static Polygon make(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return *vertices_; }
  std::size_t size() const { return vertices_->size(); }
  double area() const { return area_; }
  Rect bbox() const { return bbox_; }
  bool is_convex() const { return convex_; }

  // Closed containment: crossing test, or within eps of the boundary.
  bool contains(Point q, double eps) const;
  // Euclidean distance from q to the boundary.
  double boundary_distance(Point q) const;

 private:
  std::shared_ptr<const std::vector<Point>> vertices_;
  double area_ = 0.0;
  Rect bbox_;
  bool convex_ = false;
};

enum class ShapeKind { polygon, ellipse };

// Facility shape in its local frame; the origin is the root point.
class Shape {
 public:
  // The origin must lie inside or on the polygon (degenerate_shape otherwise).
  static Shape polygon(std::vector<Point> vertices);
  // Axis-aligned ellipse {(x/a)^2 + (y/b)^2 <= 1}.
  static Shape ellipse(double a, double b);

  ShapeKind kind() const { return kind_; }
  const Polygon& poly() const;  // polygon shapes only
  double semi_x() const { return a_; }
  double semi_y() const { return b_; }
  Rect bbox() const;
  double area() const;

  // Vertices for polygons; the inscribed regular 64-gon for ellipses.
  const std::vector<Point>& outline() const { return *outline_; }

  friend bool operator==(const Shape& s, const Shape& t);

 private:
  ShapeKind kind_ = ShapeKind::polygon;
  std::shared_ptr<const Polygon> poly_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::shared_ptr<const std::vector<Point>> outline_;
};

// A shape placed with its root at `root`, optionally shrunk about the root by
// `scale` in (0, 1] (used by wavefront growth).
struct PlacedShape {
  Shape shape;
  Point root;
  double scale = 1.0;

  Point to_world(Point local) const { return root + scale * local; }
  Point to_local(Point world) const {
    return (1.0 / scale) * (world - root);
  }
  std::vector<Point> world_outline() const;
  Rect world_bbox() const;
};

PlacedShape translate(const Shape& s, Point root_at);

bool contains_point(const PlacedShape& p, Point q, double eps);

// True iff the placed shape lies in the closed region.
bool shape_inside_polygon(const PlacedShape& p, const Polygon& region,
                          double eps);

// True iff the open shape and open rect overlap with positive area.
bool interior_intersects_rect(const PlacedShape& p, const Rect& r, double eps);

// Minkowski functional of the shape evaluated at v. Requires the origin in the
// interior (degenerate_shape otherwise). Meaningful for convex shapes.
double gauge_value(const Shape& s, Point v);

// max over world vertices v of n(q - v). Polygons only (unsupported_shape).
double max_vertex_distance(Point q, const PlacedShape& p, const Norm& n);

// Minimum l1 distance between points of the two closed shapes. Exact for
// polygons; ellipses use their 64-gon outline.
double min_l1_shape_distance(const PlacedShape& p, const PlacedShape& q);

// Exact l1 distance between two closed segments.
double l1_segment_distance(Point p0, Point p1, Point q0, Point q1);

// Area of the intersection of a polygon (any simple polygon) and a rect.
double clipped_area(const std::vector<Point>& polygon, const Rect& r);

}  // namespace dimfac
