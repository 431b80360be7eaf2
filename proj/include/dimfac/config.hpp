// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// Instance configuration ("dimfac-instance/1") and solution records
// ("dimfac-solution/1"), both JSON. docs/config_schema.md describes the
// fields.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimfac/costs.hpp"
#include "dimfac/evaluate.hpp"
#include "dimfac/expr.hpp"
#include "dimfac/geometry.hpp"
#include "dimfac/grasp.hpp"
#include "dimfac/grid.hpp"

namespace dimfac {

inline constexpr const char* kInstanceSchema = "dimfac-instance/1";
inline constexpr const char* kSolutionSchema = "dimfac-solution/1";

struct FacilityConfig {
  std::string name;
  Facility facility;
};

struct InstanceConfig {
  std::string name;
  std::vector<Point> region;
  int nx = 10;
  int ny = 10;
  std::optional<Rect> bbox;  // default: region bbox
  std::string demand = "1";  // D(x, y)
  std::string base = "0";    // B(x, y)
  PiecewiseLinear lost_cost = PiecewiseLinear::identity();
  std::vector<FacilityConfig> facilities;
  GraspParams grasp;
  std::uint64_t exact_limit = 10'000'000;
  int quadrature_order = 4;
  double eps = 1e-9;
};

// Throws Error(config) naming the offending field path, e.g.
// "facilities[1].utility.kind: ...".
InstanceConfig parse_config(const std::string& json_text);
InstanceConfig load_config(const std::string& path);

// Canonical JSON: cost functions as breakpoint lists, every optional field
// spelled out. dump(parse(dump(c))) == dump(c).
std::string dump_config(const InstanceConfig& cfg);

// Hex digest of the canonical instance data without the solver section.
std::string instance_fingerprint(const InstanceConfig& cfg);

Problem build_problem(const InstanceConfig& cfg, int threads = 0);

struct SolutionRecord {
  std::string instance_name;
  std::string fingerprint;
  int nx = 0;
  int ny = 0;
  std::string method;  // grasp, exact, evaluate
  std::uint64_t seed = 0;
  Placement placement;
  std::vector<Point> roots;
  Evaluation evaluation;
  std::vector<std::pair<std::string, double>> stats;  // solver counters
  std::vector<std::string> warnings;
  double preprocess_seconds = 0.0;
  double solve_seconds = 0.0;
};

SolutionRecord make_record(const InstanceConfig& cfg, const Problem& p,
                           std::string method, std::uint64_t seed,
                           const Placement& placement, const Evaluation& ev);

// Timing lives under its own "timing" key; everything else is a pure
// function of the inputs.
std::string dump_record(const SolutionRecord& r);
SolutionRecord parse_record(const std::string& json_text);
SolutionRecord load_record(const std::string& path);

// Throws mismatch unless the record was produced for this instance.
void check_record_matches(const SolutionRecord& r, const InstanceConfig& cfg);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dimfac
