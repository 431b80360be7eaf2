// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include <fmt/format.h>
#include <json.hpp>

#include "dimfac/config.hpp"
#include "dimfac/error.hpp"
#include "json_util.hpp"

namespace dimfac {

using namespace jsonutil;
// Sorted keys keep record files diffable.
using sjson = nlohmann::json;

namespace {

std::vector<double> read_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t s = 0; s < j.size(); ++s) v.push_back(number(j[s], fmt::format("{}[{}]", path, s)));
  return v;
}

}  // namespace

SolutionRecord make_record(const InstanceConfig& cfg, const Problem& p, std::string method,
                           std::uint64_t seed, const Placement& placement, const Evaluation& ev) {
  SolutionRecord r;
  r.instance_name = cfg.name;
  r.fingerprint = instance_fingerprint(cfg);
  r.nx = cfg.nx;
  r.ny = cfg.ny;
  r.method = std::move(method);
  r.seed = seed;
  r.placement = placement;
  for (CellIndex c : placement) r.roots.push_back(cell_center(p.di.grid, c));
  r.evaluation = ev;
  r.warnings = p.warnings;
  return r;
}

std::string dump_record(const SolutionRecord& r) {
  sjson j;
  j["schema"] = kSolutionSchema;
  j["instance"] = {{"name", r.instance_name}, {"fingerprint", r.fingerprint}, {"nx", r.nx}, {"ny", r.ny}};
  j["method"] = r.method;
  j["seed"] = r.seed;
  sjson pl = sjson::array();
  for (CellIndex c : r.placement) pl.push_back({c.k, c.l});
  j["placement"] = pl;
  sjson roots = sjson::array();
  for (Point q : r.roots) roots.push_back({q.x, q.y});
  j["roots"] = roots;
  const Evaluation& e = r.evaluation;
  j["objective"] = {{"total", e.total}, {"install", e.install}, {"congestion", e.congestion}, {"lost", e.lost}};
  const Allocation& a = e.allocation;
  j["allocation"] = {{"owner", a.owner},
                     {"covered", a.covered},
                     {"assigned_mass", a.assigned_mass},
                     {"install_mass", a.install_mass},
                     {"lost_mass", a.lost_mass}};
  sjson stats = sjson::object();
  for (const auto& [k, v] : r.stats) stats[k] = v;
  j["stats"] = stats;
  j["warnings"] = r.warnings;
  j["timing"] = {{"preprocess_seconds", r.preprocess_seconds}, {"solve_seconds", r.solve_seconds}};
  return compact_dump(j) + "\n";
}

SolutionRecord parse_record(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config, fmt::format("invalid JSON: {}", e.what()));
  }
  const std::string root = "$";
  if (!j.is_object()) fail(root, "expected an object");
  const std::string schema = string(field(j, "schema", root), "schema");
  if (schema != kSolutionSchema) fail("schema", fmt::format("expected \"{}\", got \"{}\"", kSolutionSchema, schema));

  SolutionRecord r;
  const json& inst = field(j, "instance", root);
  r.instance_name = string(field(inst, "name", "instance"), "instance.name");
  r.fingerprint = string(field(inst, "fingerprint", "instance"), "instance.fingerprint");
  r.nx = integer(field(inst, "nx", "instance"), "instance.nx");
  r.ny = integer(field(inst, "ny", "instance"), "instance.ny");
  r.method = string(field(j, "method", root), "method");
  r.seed = unsigned64(field(j, "seed", root), "seed");

  const json& pl = field(j, "placement", root);
  if (!pl.is_array()) fail("placement", "expected an array of [k, l] pairs");
  for (std::size_t i = 0; i < pl.size(); ++i) {
    const std::string p = fmt::format("placement[{}]", i);
    if (!pl[i].is_array() || pl[i].size() != 2) fail(p, "expected [k, l]");
    r.placement.push_back({integer(pl[i][0], p + "[0]"), integer(pl[i][1], p + "[1]")});
  }
  if (j.contains("roots")) {
    const json& rj = j["roots"];
    if (!rj.is_array()) fail("roots", "expected an array");
    for (std::size_t i = 0; i < rj.size(); ++i) {
      const std::string p = fmt::format("roots[{}]", i);
      if (!rj[i].is_array() || rj[i].size() != 2) fail(p, "expected [x, y]");
      r.roots.push_back({number(rj[i][0], p + "[0]"), number(rj[i][1], p + "[1]")});
    }
  }

  const json& ob = field(j, "objective", root);
  Evaluation& e = r.evaluation;
  e.total = number(field(ob, "total", "objective"), "objective.total");
  e.install = read_doubles(field(ob, "install", "objective"), "objective.install");
  e.congestion = read_doubles(field(ob, "congestion", "objective"), "objective.congestion");
  e.lost = number(field(ob, "lost", "objective"), "objective.lost");

  if (j.contains("allocation")) {
    const json& al = j["allocation"];
    Allocation& a = e.allocation;
    if (al.contains("owner")) {
      const json& o = al["owner"];
      if (!o.is_array()) fail("allocation.owner", "expected an array");
      for (std::size_t s = 0; s < o.size(); ++s) a.owner.push_back(integer(o[s], fmt::format("allocation.owner[{}]", s)));
    }
    if (al.contains("covered")) {
      const json& c = al["covered"];
      if (!c.is_array()) fail("allocation.covered", "expected an array");
      for (std::size_t s = 0; s < c.size(); ++s)
        a.covered.push_back(static_cast<std::uint8_t>(integer(c[s], fmt::format("allocation.covered[{}]", s)) != 0));
    }
    if (al.contains("assigned_mass")) a.assigned_mass = read_doubles(al["assigned_mass"], "allocation.assigned_mass");
    if (al.contains("install_mass")) a.install_mass = read_doubles(al["install_mass"], "allocation.install_mass");
    if (al.contains("lost_mass")) a.lost_mass = number(al["lost_mass"], "allocation.lost_mass");
  }
  if (j.contains("stats")) {
    const json& st = j["stats"];
    if (!st.is_object()) fail("stats", "expected an object");
    for (auto it = st.begin(); it != st.end(); ++it)
      r.stats.emplace_back(it.key(), number(it.value(), "stats." + it.key()));
  }
  if (j.contains("warnings")) {
    const json& w = j["warnings"];
    if (!w.is_array()) fail("warnings", "expected an array");
    for (std::size_t s = 0; s < w.size(); ++s) r.warnings.push_back(string(w[s], fmt::format("warnings[{}]", s)));
  }
  if (j.contains("timing")) {
    const json& t = j["timing"];
    if (t.contains("preprocess_seconds")) r.preprocess_seconds = number(t["preprocess_seconds"], "timing.preprocess_seconds");
    if (t.contains("solve_seconds")) r.solve_seconds = number(t["solve_seconds"], "timing.solve_seconds");
  }
  return r;
}

SolutionRecord load_record(const std::string& path) { return parse_record(read_text_file(path)); }

void check_record_matches(const SolutionRecord& r, const InstanceConfig& cfg) {
  const std::string fp = instance_fingerprint(cfg);
  if (r.fingerprint != fp)
    throw Error(Errc::mismatch,
                fmt::format("solution was produced for instance {} ('{}'), not {} ('{}')", r.fingerprint,
                            r.instance_name, fp, cfg.name));
  if (r.nx != cfg.nx || r.ny != cfg.ny)
    throw Error(Errc::mismatch, fmt::format("solution grid {}x{} differs from instance grid {}x{}", r.nx, r.ny,
                                            cfg.nx, cfg.ny));
  if (r.placement.size() != cfg.facilities.size())
    throw Error(Errc::mismatch, fmt::format("solution places {} facilities, instance has {}", r.placement.size(),
                                            cfg.facilities.size()));
}

}  // namespace dimfac
