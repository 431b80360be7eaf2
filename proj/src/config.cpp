// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dimfac/error.hpp"
#include "json_util.hpp"

namespace dimfac {

using json = nlohmann::ordered_json;
using namespace jsonutil;

namespace {

std::vector<Point> read_points(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [x, y] pairs");
  std::vector<Point> pts;
  for (std::size_t v = 0; v < j.size(); ++v) {
    const std::string p = fmt::format("{}[{}]", path, v);
    if (!j[v].is_array() || j[v].size() != 2) fail(p, "expected [x, y]");
    pts.push_back({number(j[v][0], p + "[0]"), number(j[v][1], p + "[1]")});
  }
  return pts;
}

json write_points(const std::vector<Point>& pts) {
  json a = json::array();
  for (Point p : pts) a.push_back({p.x, p.y});
  return a;
}

PiecewiseLinear read_pl(const json& j, const std::string& path) {
  try {
    if (j.is_number()) return PiecewiseLinear::constant(number(j, path));
    if (j.is_array()) {
      std::vector<Breakpoint> pts;
      for (Point p : read_points(j, path)) pts.push_back({p.x, p.y});
      return PiecewiseLinear::make(std::move(pts));
    }
    if (j.is_object()) {
      check_keys(j, {"expr", "breakpoints"}, path);
      const std::string text = string(field(j, "expr", path), path + ".expr");
      const json& bj = field(j, "breakpoints", path);
      if (!bj.is_array()) fail(path + ".breakpoints", "expected an array of numbers");
      std::vector<double> om;
      for (std::size_t s = 0; s < bj.size(); ++s)
        om.push_back(number(bj[s], fmt::format("{}.breakpoints[{}]", path, s)));
      return pl_from_expr(Expr::parse(text, {"t"}), om);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    fail(path, e.what());
  }
  fail(path, "expected a number, a breakpoint list or {\"expr\", \"breakpoints\"}");
}

json write_pl(const PiecewiseLinear& f) {
  json a = json::array();
  for (const Breakpoint& b : f.points()) a.push_back({b.omega, b.value});
  return a;
}

Shape read_shape(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) fail(path, "expected {\"polygon\": [...]} or {\"ellipse\": [a, b]}");
  try {
    if (j.contains("polygon")) return Shape::polygon(read_points(j["polygon"], path + ".polygon"));
    if (j.contains("ellipse")) {
      const json& e = j["ellipse"];
      if (!e.is_array() || e.size() != 2) fail(path + ".ellipse", "expected [a, b]");
      return Shape::ellipse(number(e[0], path + ".ellipse[0]"), number(e[1], path + ".ellipse[1]"));
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    fail(path, e.what());
  }
  fail(path, "unknown shape kind");
}

json write_shape(const Shape& s) {
  if (s.kind() == ShapeKind::ellipse) return json{{"ellipse", {s.semi_x(), s.semi_y()}}};
  return json{{"polygon", write_points(s.poly().vertices())}};
}

Norm read_norm(const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "l1") return Norm::l1();
    if (s == "l2") return Norm::l2();
    if (s == "linf") return Norm::linf();
    fail(path, "expected l1, l2, linf or {\"weighted_l2\": [wx, wy]}");
  }
  if (j.is_object() && j.size() == 1 && j.contains("weighted_l2")) {
    const json& w = j["weighted_l2"];
    if (!w.is_array() || w.size() != 2) fail(path + ".weighted_l2", "expected [wx, wy]");
    try {
      return Norm::weighted_l2(number(w[0], path + ".weighted_l2[0]"), number(w[1], path + ".weighted_l2[1]"));
    } catch (const Error& e) {
      if (e.code() == Errc::config) throw;
      fail(path, e.what());
    }
  }
  fail(path, "expected l1, l2, linf or {\"weighted_l2\": [wx, wy]}");
}

json write_norm(const Norm& n) {
  switch (n.kind) {
    case NormKind::l1: return "l1";
    case NormKind::l2: return "l2";
    case NormKind::linf: return "linf";
    case NormKind::weighted_l2: return json{{"weighted_l2", {n.wx, n.wy}}};
  }
  return "l2";
}

UtilitySpec read_utility(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, {"kind", "norm", "clamped", "scale"}, path);
  UtilitySpec u;
  const std::string kind = string(field(j, "kind", path), path + ".kind");
  if (kind == "norm_to_root") u.kind = UtilityKind::norm_to_root;
  else if (kind == "gauge") u.kind = UtilityKind::gauge;
  else if (kind == "max_distance") u.kind = UtilityKind::max_distance;
  else fail(path + ".kind", "expected norm_to_root, gauge or max_distance");
  if (j.contains("norm")) {
    if (u.kind == UtilityKind::gauge) fail(path + ".norm", "gauge utilities take no norm");
    u.norm = read_norm(j["norm"], path + ".norm");
  }
  if (j.contains("clamped")) {
    if (u.kind != UtilityKind::gauge) fail(path + ".clamped", "only gauge utilities can be clamped");
    u.clamped = boolean(j["clamped"], path + ".clamped");
  }
  if (j.contains("scale") && !j["scale"].is_null()) {
    const std::string text = string(j["scale"], path + ".scale");
    try {
      u.scale = Expr::parse(text, {"t"});
    } catch (const Error& e) {
      fail(path + ".scale", e.what());
    }
  }
  return u;
}

json write_utility(const UtilitySpec& u) {
  json j;
  switch (u.kind) {
    case UtilityKind::norm_to_root: j["kind"] = "norm_to_root"; break;
    case UtilityKind::gauge: j["kind"] = "gauge"; break;
    case UtilityKind::max_distance: j["kind"] = "max_distance"; break;
  }
  if (u.kind == UtilityKind::gauge) j["clamped"] = u.clamped;
  else j["norm"] = write_norm(u.norm);
  j["scale"] = u.scale.empty() ? json(nullptr) : json(u.scale.to_string());
  return j;
}

GraspParams read_grasp(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, {"psi", "varpi", "lambda", "vartheta", "upsilon1", "upsilon2", "delta_k", "delta_l",
                 "epsilon_ball", "max_outer", "restart_cap", "slot_attempts"},
             path);
  GraspParams g;
  auto opt_int = [&](const char* k, int& out) {
    if (j.contains(k)) out = integer(j[k], path + "." + k);
  };
  auto opt_num = [&](const char* k, double& out) {
    if (j.contains(k)) out = number(j[k], path + "." + k);
  };
  opt_int("psi", g.psi);
  opt_int("varpi", g.varpi);
  opt_num("lambda", g.lambda);
  opt_num("vartheta", g.vartheta);
  opt_int("upsilon1", g.upsilon1);
  opt_int("upsilon2", g.upsilon2);
  opt_int("delta_k", g.delta_k);
  opt_int("delta_l", g.delta_l);
  opt_num("epsilon_ball", g.epsilon_ball);
  opt_int("max_outer", g.max_outer);
  opt_int("restart_cap", g.restart_cap);
  opt_int("slot_attempts", g.slot_attempts);
  try {
    g.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return g;
}

json write_grasp(const GraspParams& g) {
  json j;
  j["psi"] = g.psi;
  j["varpi"] = g.varpi;
  j["lambda"] = g.lambda;
  j["vartheta"] = g.vartheta;
  j["upsilon1"] = g.upsilon1;
  j["upsilon2"] = g.upsilon2;
  j["delta_k"] = g.delta_k;
  j["delta_l"] = g.delta_l;
  j["epsilon_ball"] = g.epsilon_ball;
  j["max_outer"] = g.max_outer;
  j["restart_cap"] = g.restart_cap;
  j["slot_attempts"] = g.slot_attempts;
  return j;
}

json instance_json(const InstanceConfig& c) {
  json j;
  j["schema"] = kInstanceSchema;
  j["name"] = c.name;
  j["region"] = write_points(c.region);
  json grid{{"nx", c.nx}, {"ny", c.ny}};
  if (c.bbox) grid["bbox"] = {c.bbox->x_lo, c.bbox->x_hi, c.bbox->y_lo, c.bbox->y_hi};
  j["grid"] = grid;
  j["densities"] = {{"D", c.demand}, {"B", c.base}};
  j["lost_cost"] = write_pl(c.lost_cost);
  json facs = json::array();
  for (const FacilityConfig& f : c.facilities) {
    json fj;
    fj["name"] = f.name;
    fj["shape"] = write_shape(f.facility.shape);
    fj["a"] = f.facility.a;
    fj["utility"] = write_utility(f.facility.utility);
    fj["install_cost"] = write_pl(f.facility.install_cost);
    fj["congestion_cost"] = write_pl(f.facility.congestion_cost);
    facs.push_back(std::move(fj));
  }
  j["facilities"] = std::move(facs);
  j["quadrature_order"] = c.quadrature_order;
  j["eps"] = c.eps;
  return j;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

InstanceConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config, fmt::format("invalid JSON: {}", e.what()));
  }
  const std::string root = "$";
  if (!j.is_object()) fail(root, "expected an object");
  check_keys(j, {"schema", "name", "region", "grid", "densities", "lost_cost", "facilities", "solver",
                 "quadrature_order", "eps"},
             root);
  const std::string schema = string(field(j, "schema", root), "schema");
  if (schema != kInstanceSchema) fail("schema", fmt::format("expected \"{}\", got \"{}\"", kInstanceSchema, schema));

  InstanceConfig c;
  if (j.contains("name")) c.name = string(j["name"], "name");
  c.region = read_points(field(j, "region", root), "region");
  try {
    Polygon::make(c.region);
  } catch (const Error& e) {
    fail("region", e.what());
  }

  const json& g = field(j, "grid", root);
  if (!g.is_object()) fail("grid", "expected an object");
  check_keys(g, {"nx", "ny", "bbox"}, "grid");
  c.nx = integer(field(g, "nx", "grid"), "grid.nx");
  c.ny = integer(field(g, "ny", "grid"), "grid.ny");
  if (c.nx < 1) fail("grid.nx", "must be >= 1");
  if (c.ny < 1) fail("grid.ny", "must be >= 1");
  if (g.contains("bbox")) {
    const json& b = g["bbox"];
    if (!b.is_array() || b.size() != 4) fail("grid.bbox", "expected [x_lo, x_hi, y_lo, y_hi]");
    const Rect r{number(b[0], "grid.bbox[0]"), number(b[1], "grid.bbox[1]"), number(b[2], "grid.bbox[2]"),
                 number(b[3], "grid.bbox[3]")};
    if (!(r.x_hi > r.x_lo && r.y_hi > r.y_lo)) fail("grid.bbox", "empty box");
    c.bbox = r;
  }

  if (j.contains("densities")) {
    const json& d = j["densities"];
    if (!d.is_object()) fail("densities", "expected an object");
    check_keys(d, {"D", "B"}, "densities");
    if (d.contains("D")) c.demand = string(d["D"], "densities.D");
    if (d.contains("B")) c.base = string(d["B"], "densities.B");
    for (const auto& [key, text] : {std::pair{"D", &c.demand}, std::pair{"B", &c.base}}) {
      try {
        Expr::parse(*text, {"x", "y"});
      } catch (const Error& e) {
        fail(std::string("densities.") + key, e.what());
      }
    }
  }
  if (j.contains("lost_cost")) c.lost_cost = read_pl(j["lost_cost"], "lost_cost");

  const json& fs = field(j, "facilities", root);
  if (!fs.is_array()) fail("facilities", "expected an array");
  if (fs.empty()) fail("facilities", "at least one facility is required");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string p = fmt::format("facilities[{}]", i);
    const json& f = fs[i];
    if (!f.is_object()) fail(p, "expected an object");
    check_keys(f, {"name", "shape", "a", "utility", "install_cost", "congestion_cost"}, p);
    FacilityConfig fc;
    fc.name = f.contains("name") ? string(f["name"], p + ".name") : fmt::format("P{}", i + 1);
    fc.facility.shape = read_shape(field(f, "shape", p), p + ".shape");
    fc.facility.a = number(field(f, "a", p), p + ".a");
    if (fc.facility.a < 0.0) fail(p + ".a", "must be >= 0");
    if (f.contains("utility")) fc.facility.utility = read_utility(f["utility"], p + ".utility");
    fc.facility.install_cost = f.contains("install_cost") ? read_pl(f["install_cost"], p + ".install_cost")
                                                          : PiecewiseLinear::constant(0.0);
    fc.facility.congestion_cost = f.contains("congestion_cost")
                                      ? read_pl(f["congestion_cost"], p + ".congestion_cost")
                                      : PiecewiseLinear::identity();
    c.facilities.push_back(std::move(fc));
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (!s.is_object()) fail("solver", "expected an object");
    check_keys(s, {"seed", "exact_limit", "grasp"}, "solver");
    if (s.contains("grasp")) c.grasp = read_grasp(s["grasp"], "solver.grasp");
    if (s.contains("seed")) c.grasp.seed = unsigned64(s["seed"], "solver.seed");
    if (s.contains("exact_limit")) c.exact_limit = unsigned64(s["exact_limit"], "solver.exact_limit");
  }
  if (j.contains("quadrature_order")) {
    c.quadrature_order = integer(j["quadrature_order"], "quadrature_order");
    if (c.quadrature_order < 1 || c.quadrature_order > 32) fail("quadrature_order", "must lie in [1, 32]");
  }
  if (j.contains("eps")) {
    c.eps = number(j["eps"], "eps");
    if (!(c.eps > 0.0)) fail("eps", "must be > 0");
  }
  return c;
}

InstanceConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string dump_config(const InstanceConfig& c) {
  json j = instance_json(c);
  j["solver"] = {{"seed", c.grasp.seed}, {"exact_limit", c.exact_limit}, {"grasp", write_grasp(c.grasp)}};
  return compact_dump(j) + "\n";
}

std::string instance_fingerprint(const InstanceConfig& c) {
  return fmt::format("{:016x}", fnv1a(instance_json(c).dump()));
}

Problem build_problem(const InstanceConfig& c, int threads) {
  const Polygon region = Polygon::make(c.region);
  const Grid g{c.bbox ? *c.bbox : region.bbox(), c.nx, c.ny};
  std::vector<Shape> shapes;
  std::vector<Facility> facs;
  for (const FacilityConfig& f : c.facilities) {
    shapes.push_back(f.facility.shape);
    facs.push_back(f.facility);
  }
  DiscretizeOptions opt;
  opt.quadrature_order = c.quadrature_order;
  opt.eps = c.eps;
  opt.threads = threads;
  Problem p{discretize(region, g, Expr::parse(c.demand, {"x", "y"}), Expr::parse(c.base, {"x", "y"}),
                       std::move(shapes), opt),
            std::move(facs), c.lost_cost, {}};
  p.warnings = validate_problem(p);
  return p;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, fmt::format("cannot open '{}' for writing", path));
  out << text;
  out.flush();
  if (!out) throw Error(Errc::io, fmt::format("write to '{}' failed", path));
}

}  // namespace dimfac
