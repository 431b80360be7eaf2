// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// The mixed-integer model of the location-allocation problem: construction,
// CPLEX-LP text output and input, and evaluation of the model at a fixed
// placement.
//
// Naming grammar (indices zero-padded to the width of their largest value):
//   t_<i>_<k>_<l>   binary, facility i rooted at cell (k, l)
//   a_<i>_<r>_<s>   binary, cell (r, s) allocated to facility i
//   p_<r>_<s>       continuous >= 0, utility of the allocated facility
//   one             continuous fixed to 1, carries constants
//   x_<b>           argument of cost block b (ins<i>, con<i>, lost)
//   z_<b>           epigraph of a convex cost block
//   y_<b>_<s>, wl_<b>_<s>, wr_<b>_<s>
//                   segment binary and endpoint weights of a general block
// Rows: A3_<i>, A4_<r>_<s>, A5_<i>_<r>_<s>, A6L_/A6U_<i>_<r>_<s>, X_<b>,
// E_<b>_<s>, S_<b>, W_<b>_<s>, V_<b>.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dimfac/evaluate.hpp"
#include "dimfac/grid.hpp"

namespace dimfac {

struct LinTerm {
  int var = 0;
  double coef = 0.0;
  friend bool operator==(const LinTerm&, const LinTerm&) = default;
};

enum class Sense { le, ge, eq };
enum class VarType { continuous, binary };

struct MilpVar {
  std::string name;
  VarType type = VarType::continuous;
  double lb = 0.0;
  double ub = 1e300;  // >= 1e300 means unbounded
  friend bool operator==(const MilpVar&, const MilpVar&) = default;
};

struct MilpRow {
  std::string name;
  std::vector<LinTerm> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
  friend bool operator==(const MilpRow&, const MilpRow&) = default;
};

class MilpModel {
 public:
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;
  std::vector<LinTerm> objective;
  std::vector<std::string> comments;  // emitted as comment lines before the objective

  int add_var(std::string name, VarType type, double lb = 0.0, double ub = 1e300);
  // Index of a named variable or row, -1 if absent.
  int var_index(const std::string& name) const;
  int row_index(const std::string& name) const;
  void reindex();

  friend bool operator==(const MilpModel& a, const MilpModel& b) {
    return a.vars == b.vars && a.rows == b.rows && a.objective == b.objective;
  }

 private:
  std::unordered_map<std::string, int> var_ix_;
  std::unordered_map<std::string, int> row_ix_;
};

struct MilpCounts {
  std::size_t variables = 0;
  std::size_t binaries = 0;
  std::size_t constraints = 0;
  std::map<std::string, std::size_t> rows_by_tag;  // prefix before the first '_'
  friend bool operator==(const MilpCounts&, const MilpCounts&) = default;
};

MilpCounts count_model(const MilpModel& m);

// M used by the exported A6 link rows: large enough for every allocation the
// lower level can produce (see the docs for the derivation).
double export_big_m(const Evaluator& ev, int threads = 0);

// Builds the model. Cost functions are extended flat to the reachable range of
// their arguments.
MilpModel build_milp(const Evaluator& ev, const std::optional<Placement>& warm_start = {},
                     int threads = 0);

void write_lp(const MilpModel& m, std::ostream& out);
// Throws syntax on malformed input.
MilpModel read_lp(std::istream& in);

struct ExportStats {
  MilpCounts counts;
  double big_m = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kLargeModelRows = 1'000'000;

ExportStats export_milp_lp(const Evaluator& ev, const std::string& path,
                           const std::optional<Placement>& warm_start = {},
                           int threads = 0);

// Values for every model variable with t fixed by `p` and the remaining
// variables set to their cheapest feasible values, derived from the model
// rows. Throws mismatch when no feasible completion exists.
std::vector<double> complete_at_placement(const MilpModel& m,
                                          const DiscretizedInstance& di,
                                          const Placement& p);

// Name of the first violated row or bound, or empty when feasible.
std::optional<std::string> check_model_feasibility(const MilpModel& m,
                                                   const std::vector<double>& x,
                                                   double tol = 1e-9);

double model_objective(const MilpModel& m, const std::vector<double>& x);

// Objective of the completed model at `p`; throws mismatch when the
// completion violates a row.
double evaluate_model_at_placement(const MilpModel& m,
                                   const DiscretizedInstance& di,
                                   const Placement& p);

}  // namespace dimfac
