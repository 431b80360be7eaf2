// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dimfac/error.hpp"
#include "dimfac/milp.hpp"
#include "dimfac/parallel.hpp"

namespace dimfac {

namespace {

constexpr double kInf = 1e300;

int digits(int v) {
  int d = 1;
  while (v >= 10) {
    v /= 10;
    ++d;
  }
  return d;
}

// Index formatting shared by the builder and the completion routine.
struct Names {
  int wi;
  int wk;
  explicit Names(const DiscretizedInstance& di)
      : wi(digits(std::max(0, di.rho() - 1))),
        wk(digits(std::max({0, di.grid.nx - 1, di.grid.ny - 1}))) {}

  std::string cell(CellIndex c) const { return fmt::format("{:0{}}_{:0{}}", c.k, wk, c.l, wk); }
  std::string fac(int i) const { return fmt::format("{:0{}}", i, wi); }
  std::string theta(int i, CellIndex c) const { return "t_" + fac(i) + "_" + cell(c); }
  std::string tau(int i, CellIndex c) const { return "a_" + fac(i) + "_" + cell(c); }
  std::string phi(CellIndex c) const { return "p_" + cell(c); }
};

std::string tag_of(const std::string& name) {
  const auto u = name.find('_');
  return u == std::string::npos ? name : name.substr(0, u);
}

double row_activity(const MilpRow& r, const std::vector<double>& x) {
  double s = 0.0;
  for (const LinTerm& t : r.terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

bool row_ok(const MilpRow& r, const std::vector<double>& x, double tol) {
  double s = 0.0, mag = std::max(1.0, std::fabs(r.rhs));
  for (const LinTerm& t : r.terms) {
    const double v = t.coef * x[static_cast<std::size_t>(t.var)];
    s += v;
    mag = std::max(mag, std::fabs(v));
  }
  const double slack = tol * mag;
  switch (r.sense) {
    case Sense::le:
      return s <= r.rhs + slack;
    case Sense::ge:
      return s >= r.rhs - slack;
    case Sense::eq:
      return std::fabs(s - r.rhs) <= slack;
  }
  return false;
}

// Solves row r for variable v with every other variable at its value in x.
double solve_for(const MilpRow& r, int v, const std::vector<double>& x) {
  double rest = 0.0, cv = 0.0;
  for (const LinTerm& t : r.terms) {
    if (t.var == v) cv += t.coef;
    else rest += t.coef * x[static_cast<std::size_t>(t.var)];
  }
  if (cv == 0.0)
    throw Error(Errc::mismatch, fmt::format("row {} does not involve the solved variable", r.name));
  return (r.rhs - rest) / cv;
}

// Cost function extended flat to [0, reach].
PiecewiseLinear extend_to(const PiecewiseLinear& f, double reach) {
  std::vector<Breakpoint> pts = f.points();
  if (pts.front().omega > 0.0) pts.insert(pts.begin(), Breakpoint{0.0, pts.front().value});
  const double hi = pts.back().omega;
  if (reach > hi + 1e-9 * std::max(1.0, std::fabs(hi))) pts.push_back({reach, pts.back().value});
  return PiecewiseLinear::make(std::move(pts));
}

class Builder {
 public:
  Builder(const Evaluator& ev, int threads)
      : ev_(ev), pb_(ev.problem()), di_(pb_.di), names_(di_), threads_(threads) {}

  MilpModel build(const std::optional<Placement>& warm) {
    const int rho = di_.rho();
    const int n = di_.size();
    const double big_m = export_big_m(ev_, threads_);
    m_.comments.push_back(fmt::format("facilities {} cells {} big-M {}", rho, n, big_m));
    if (warm) {
      placement_omega(di_, *warm);
      m_.comments.push_back("warm start");
      for (int i = 0; i < rho; ++i)
        m_.comments.push_back(names_.theta(i, (*warm)[static_cast<std::size_t>(i)]) + " = 1");
    }

    // Variables.
    theta_.resize(static_cast<std::size_t>(rho));
    for (int i = 0; i < rho; ++i)
      for (int o : di_.facilities[static_cast<std::size_t>(i)].feasible)
        theta_[static_cast<std::size_t>(i)].push_back(
            m_.add_var(names_.theta(i, di_.cells[static_cast<std::size_t>(o)]), VarType::binary, 0, 1));
    tau_.assign(static_cast<std::size_t>(rho), std::vector<int>(static_cast<std::size_t>(n)));
    for (int i = 0; i < rho; ++i)
      for (int c = 0; c < n; ++c)
        tau_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
            m_.add_var(names_.tau(i, di_.cells[static_cast<std::size_t>(c)]), VarType::binary, 0, 1);
    phi_.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c)
      phi_[static_cast<std::size_t>(c)] = m_.add_var(names_.phi(di_.cells[static_cast<std::size_t>(c)]), VarType::continuous);
    one_ = m_.add_var("one", VarType::continuous, 1.0, 1.0);

    // Utility tables, root-position major.
    std::vector<std::vector<double>> u(static_cast<std::size_t>(rho));
    for (int i = 0; i < rho; ++i) {
      const auto& feas = di_.facilities[static_cast<std::size_t>(i)].feasible;
      auto& ui = u[static_cast<std::size_t>(i)];
      ui.resize(feas.size() * static_cast<std::size_t>(n));
      parallel_for(feas.size(), threads_ > 0 ? threads_ : default_threads(), [&](std::size_t pos) {
        const UtilityRow r = ev_.row(i, feas[pos]);
        std::copy(r->begin(), r->end(), ui.begin() + static_cast<std::ptrdiff_t>(pos * static_cast<std::size_t>(n)));
      });
    }

    // Cells covered by each theta.
    std::vector<std::vector<LinTerm>> cover(static_cast<std::size_t>(n));
    for (int i = 0; i < rho; ++i) {
      const auto& feas = di_.facilities[static_cast<std::size_t>(i)].feasible;
      for (std::size_t pos = 0; pos < feas.size(); ++pos)
        for (int c : di_.footprint(i, feas[pos]))
          cover[static_cast<std::size_t>(c)].push_back({theta_[static_cast<std::size_t>(i)][pos], 1.0});
    }

    for (int i = 0; i < rho; ++i) {
      MilpRow r{"A3_" + names_.fac(i), {}, Sense::eq, 1.0};
      for (int v : theta_[static_cast<std::size_t>(i)]) r.terms.push_back({v, 1.0});
      m_.rows.push_back(std::move(r));
    }
    for (int c = 0; c < n; ++c) {
      MilpRow r{"A4_" + names_.cell(di_.cells[static_cast<std::size_t>(c)]), {}, Sense::eq, 1.0};
      for (int i = 0; i < rho; ++i) r.terms.push_back({tau_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)], 1.0});
      for (const LinTerm& t : cover[static_cast<std::size_t>(c)]) r.terms.push_back(t);
      m_.rows.push_back(std::move(r));
    }
    for (int c = 0; c < n; ++c) {
      const double w = di_.wD[static_cast<std::size_t>(c)];
      const std::string cn = names_.cell(di_.cells[static_cast<std::size_t>(c)]);
      for (int i = 0; i < rho; ++i) {
        const Facility& f = pb_.facilities[static_cast<std::size_t>(i)];
        MilpRow r{"A5_" + names_.fac(i) + "_" + cn, {}, Sense::le, f.a * w};
        for (int j = 0; j < rho; ++j)
          r.terms.push_back({tau_[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)],
                             pb_.facilities[static_cast<std::size_t>(j)].a * w});
        r.terms.push_back({phi_[static_cast<std::size_t>(c)], w});
        const auto& ui = u[static_cast<std::size_t>(i)];
        const auto& th = theta_[static_cast<std::size_t>(i)];
        for (std::size_t pos = 0; pos < th.size(); ++pos)
          r.terms.push_back({th[pos], -(w * ui[pos * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)])});
        m_.rows.push_back(std::move(r));
      }
    }
    for (int c = 0; c < n; ++c) {
      const std::string cn = names_.cell(di_.cells[static_cast<std::size_t>(c)]);
      for (int i = 0; i < rho; ++i) {
        const auto& ui = u[static_cast<std::size_t>(i)];
        const auto& th = theta_[static_cast<std::size_t>(i)];
        for (int side = 0; side < 2; ++side) {
          // Lower: p - sum u t - M a >= -M. Upper: p - sum u t + M a <= M.
          MilpRow r{(side == 0 ? "A6L_" : "A6U_") + names_.fac(i) + "_" + cn, {},
                    side == 0 ? Sense::ge : Sense::le, side == 0 ? -big_m : big_m};
          r.terms.push_back({phi_[static_cast<std::size_t>(c)], 1.0});
          for (std::size_t pos = 0; pos < th.size(); ++pos)
            r.terms.push_back({th[pos], -ui[pos * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)]});
          r.terms.push_back({tau_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)], side == 0 ? -big_m : big_m});
          m_.rows.push_back(std::move(r));
        }
      }
    }

    cost_blocks();
    m_.reindex();
    return std::move(m_);
  }

 private:
  void cost_blocks() {
    const int rho = di_.rho();
    const int n = di_.size();
    double total_d = 0.0;
    for (double w : di_.wD) total_d += w;

    for (int i = 0; i < rho; ++i) {
      const auto& feas = di_.facilities[static_cast<std::size_t>(i)].feasible;
      std::vector<LinTerm> arg;
      double reach = 0.0;
      for (std::size_t pos = 0; pos < feas.size(); ++pos) {
        double mass = 0.0;
        for (int c : di_.footprint(i, feas[pos])) mass += di_.wB[static_cast<std::size_t>(c)];
        reach = std::max(reach, mass);
        arg.push_back({theta_[static_cast<std::size_t>(i)][pos], -mass});
      }
      block("ins" + names_.fac(i), pb_.facilities[static_cast<std::size_t>(i)].install_cost,
            std::move(arg), 0.0, reach);
    }
    for (int i = 0; i < rho; ++i) {
      std::vector<LinTerm> arg;
      for (int c = 0; c < n; ++c)
        arg.push_back({tau_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)], -di_.wD[static_cast<std::size_t>(c)]});
      block("con" + names_.fac(i), pb_.facilities[static_cast<std::size_t>(i)].congestion_cost,
            std::move(arg), 0.0, total_d);
    }
    std::vector<LinTerm> arg;
    for (int i = 0; i < rho; ++i)
      for (int c = 0; c < n; ++c)
        arg.push_back({tau_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)], di_.wD[static_cast<std::size_t>(c)]});
    block("lost", pb_.lost_cost, std::move(arg), total_d, total_d);
  }

  // Adds cost block b of f(x_b) with x_b defined by x_b + sum(arg) = rhs.
  void block(const std::string& b, const PiecewiseLinear& f0, std::vector<LinTerm> arg,
             double rhs, double reach) {
    const PiecewiseLinear f = extend_to(f0, reach);
    const auto& pts = f.points();
    const int x = m_.add_var("x_" + b, VarType::continuous);
    MilpRow def{"X_" + b, {{x, 1.0}}, Sense::eq, rhs};
    for (const LinTerm& t : arg) def.terms.push_back(t);
    m_.rows.push_back(std::move(def));

    if (f.is_affine()) {
      const double slope = f.slope(0);
      const double c = pts[0].value - slope * pts[0].omega;
      m_.objective.push_back({x, slope});
      if (c != 0.0) m_.objective.push_back({one_, c});
      return;
    }
    if (f.is_convex()) {
      const int z = m_.add_var("z_" + b, VarType::continuous);
      for (std::size_t s = 0; s < f.segments(); ++s) {
        const double slope = f.slope(s);
        m_.rows.push_back({fmt::format("E_{}_{}", b, s), {{z, 1.0}, {x, -slope}}, Sense::ge,
                           pts[s].value - slope * pts[s].omega});
      }
      m_.objective.push_back({z, 1.0});
      return;
    }
    MilpRow sel{"S_" + b, {}, Sense::eq, 1.0};
    MilpRow val{"V_" + b, {{x, 1.0}}, Sense::eq, 0.0};
    for (std::size_t s = 0; s < f.segments(); ++s) {
      const int y = m_.add_var(fmt::format("y_{}_{}", b, s), VarType::binary, 0, 1);
      const int wl = m_.add_var(fmt::format("wl_{}_{}", b, s), VarType::continuous);
      const int wr = m_.add_var(fmt::format("wr_{}_{}", b, s), VarType::continuous);
      sel.terms.push_back({y, 1.0});
      m_.rows.push_back({fmt::format("W_{}_{}", b, s), {{wl, 1.0}, {wr, 1.0}, {y, -1.0}}, Sense::eq, 0.0});
      val.terms.push_back({wl, -pts[s].omega});
      val.terms.push_back({wr, -pts[s + 1].omega});
      m_.objective.push_back({wl, pts[s].value});
      m_.objective.push_back({wr, pts[s + 1].value});
    }
    m_.rows.push_back(std::move(sel));
    m_.rows.push_back(std::move(val));
  }

  const Evaluator& ev_;
  const Problem& pb_;
  const DiscretizedInstance& di_;
  Names names_;
  int threads_;
  MilpModel m_;
  std::vector<std::vector<int>> theta_;
  std::vector<std::vector<int>> tau_;
  std::vector<int> phi_;
  int one_ = -1;
};

// LP text output.

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  return fmt::format("{}", v);
}

void write_terms(std::ostream& out, const std::vector<LinTerm>& terms, const MilpModel& m) {
  int on_line = 0;
  for (const LinTerm& t : terms) {
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    const double c = t.coef == 0.0 ? 0.0 : t.coef;
    out << (std::signbit(c) ? " - " : " + ") << num(std::fabs(c)) << ' '
        << m.vars[static_cast<std::size_t>(t.var)].name;
    ++on_line;
  }
}

// LP text input.

struct Token {
  enum Kind { name, number, op, sign, colon } kind;
  std::string text;
  double value = 0.0;
};

[[noreturn]] void lp_error(const std::string& what, std::size_t line) {
  throw Error(Errc::syntax, fmt::format("LP line {}: {}", line, what));
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         std::string_view("!\"#$%&()/,;?@'`{}|~").find(c) != std::string_view::npos;
}
bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
         c == '[' || c == ']';
}

void tokenize(const std::string& s, std::size_t line, std::vector<std::pair<Token, std::size_t>>& out) {
  std::size_t p = 0;
  while (p < s.size()) {
    const char c = s[p];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++p;
    } else if (c == '+' || c == '-') {
      out.push_back({{Token::sign, std::string(1, c)}, line});
      ++p;
    } else if (c == ':') {
      out.push_back({{Token::colon, ":"}, line});
      ++p;
    } else if (c == '<' || c == '>' || c == '=') {
      std::size_t q = p + 1;
      if (q < s.size() && (s[q] == '=' || s[q] == '<' || s[q] == '>')) ++q;
      std::string o = s.substr(p, q - p);
      if (o == "=<" || o == "<") o = "<=";
      if (o == "=>" || o == ">") o = ">=";
      if (o != "<=" && o != ">=" && o != "=") lp_error("bad operator '" + o + "'", line);
      out.push_back({{Token::op, o}, line});
      p = q;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto r = std::from_chars(s.data() + p, s.data() + s.size(), v);
      if (r.ec != std::errc()) lp_error("bad number", line);
      const std::size_t q = static_cast<std::size_t>(r.ptr - s.data());
      out.push_back({{Token::number, s.substr(p, q - p), v}, line});
      p = q;
    } else if (is_name_start(c)) {
      std::size_t q = p + 1;
      while (q < s.size() && is_name_char(s[q])) ++q;
      out.push_back({{Token::name, s.substr(p, q - p)}, line});
      p = q;
    } else {
      lp_error(fmt::format("unexpected character '{}'", c), line);
    }
  }
}

enum class Section { none, objective, constraints, bounds, binary, general, end };

std::optional<Section> section_keyword(std::string s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "minimize" || t == "minimise" || t == "minimum" || t == "min") return Section::objective;
  if (t == "subjectto" || t == "st" || t == "s.t." || t == "suchthat") return Section::constraints;
  if (t == "bounds" || t == "bound") return Section::bounds;
  if (t == "binary" || t == "binaries" || t == "bin") return Section::binary;
  if (t == "general" || t == "generals" || t == "gen") return Section::general;
  if (t == "end") return Section::end;
  return std::nullopt;
}

class LpParser {
 public:
  explicit LpParser(MilpModel& m) : m_(m) {}

  int var(const std::string& name) {
    const int v = m_.var_index(name);
    if (v >= 0) return v;
    return m_.add_var(name, VarType::continuous);
  }

  using Toks = std::vector<std::pair<Token, std::size_t>>;

  // [name :] then signed terms until an operator or the end.
  std::vector<LinTerm> terms(const Toks& t, std::size_t& p, bool stop_at_op) {
    std::vector<LinTerm> out;
    while (p < t.size() && !(stop_at_op && t[p].first.kind == Token::op)) {
      double sign = 1.0;
      bool any_sign = false;
      while (p < t.size() && t[p].first.kind == Token::sign) {
        if (t[p].first.text == "-") sign = -sign;
        any_sign = true;
        ++p;
      }
      double coef = 1.0;
      if (p < t.size() && t[p].first.kind == Token::number) {
        coef = t[p].first.value;
        ++p;
      }
      if (p >= t.size() || t[p].first.kind != Token::name) {
        if (any_sign || coef != 1.0) lp_error("expected a variable name", p < t.size() ? t[p].second : 0);
        break;
      }
      out.push_back({var(t[p].first.text), sign * coef});
      ++p;
    }
    return out;
  }

  static std::string label(const Toks& t, std::size_t& p) {
    if (p + 1 < t.size() && t[p].first.kind == Token::name && t[p + 1].first.kind == Token::colon) {
      std::string n = t[p].first.text;
      p += 2;
      return n;
    }
    return {};
  }

  static double number(const Toks& t, std::size_t& p) {
    double sign = 1.0;
    while (p < t.size() && t[p].first.kind == Token::sign) {
      if (t[p].first.text == "-") sign = -sign;
      ++p;
    }
    if (p < t.size() && t[p].first.kind == Token::name) {
      std::string s = t[p].first.text;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
      if (s == "inf" || s == "infinity") {
        ++p;
        return sign * kInf;
      }
    }
    if (p >= t.size() || t[p].first.kind != Token::number)
      lp_error("expected a number", p < t.size() ? t[p].second : 0);
    return sign * t[p++].first.value;
  }

  void objective(const Toks& t) {
    std::size_t p = 0;
    label(t, p);
    m_.objective = terms(t, p, false);
    if (p != t.size()) lp_error("trailing tokens in objective", t[p].second);
  }

  void constraints(const Toks& t) {
    std::size_t p = 0;
    int unnamed = 0;
    while (p < t.size()) {
      MilpRow r;
      r.name = label(t, p);
      if (r.name.empty()) r.name = fmt::format("R{}", ++unnamed);
      r.terms = terms(t, p, true);
      if (p >= t.size() || t[p].first.kind != Token::op) lp_error("expected a relational operator", p < t.size() ? t[p].second : t.back().second);
      const std::string o = t[p++].first.text;
      r.sense = o == "<=" ? Sense::le : o == ">=" ? Sense::ge : Sense::eq;
      r.rhs = number(t, p);
      m_.rows.push_back(std::move(r));
    }
  }

  void bounds(const Toks& t) {
    std::size_t p = 0;
    while (p < t.size()) {
      const std::size_t line = t[p].second;
      if (t[p].first.kind == Token::name && !(p + 1 < t.size() && t[p + 1].first.kind == Token::colon)) {
        const int v = var(t[p].first.text);
        ++p;
        if (p < t.size() && t[p].first.kind == Token::name) {
          std::string s = t[p].first.text;
          std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
          if (s != "free") lp_error("expected 'free'", line);
          m_.vars[static_cast<std::size_t>(v)].lb = -kInf;
          m_.vars[static_cast<std::size_t>(v)].ub = kInf;
          ++p;
          continue;
        }
        if (p >= t.size() || t[p].first.kind != Token::op) lp_error("expected a bound operator", line);
        const std::string o = t[p++].first.text;
        const double b = number(t, p);
        auto& mv = m_.vars[static_cast<std::size_t>(v)];
        if (o == "<=") mv.ub = b;
        else if (o == ">=") mv.lb = b;
        else mv.lb = mv.ub = b;
      } else {
        const double lo = number(t, p);
        if (p >= t.size() || t[p].first.kind != Token::op || t[p].first.text != "<=") lp_error("expected '<='", line);
        ++p;
        if (p >= t.size() || t[p].first.kind != Token::name) lp_error("expected a variable name", line);
        auto& mv = m_.vars[static_cast<std::size_t>(var(t[p++].first.text))];
        mv.lb = lo;
        if (p < t.size() && t[p].first.kind == Token::op) {
          if (t[p].first.text != "<=") lp_error("expected '<='", line);
          ++p;
          mv.ub = number(t, p);
        }
      }
    }
  }

  void binaries(const Toks& t) {
    for (const auto& [tok, line] : t) {
      if (tok.kind != Token::name) lp_error("expected a variable name", line);
      auto& mv = m_.vars[static_cast<std::size_t>(var(tok.text))];
      mv.type = VarType::binary;
      mv.lb = std::max(mv.lb, 0.0);
      mv.ub = std::min(mv.ub, 1.0);
    }
  }

 private:
  MilpModel& m_;
};

}  // namespace

int MilpModel::add_var(std::string name, VarType type, double lb, double ub) {
  const int ix = static_cast<int>(vars.size());
  var_ix_.emplace(name, ix);
  vars.push_back({std::move(name), type, lb, ub});
  return ix;
}

int MilpModel::var_index(const std::string& name) const {
  auto it = var_ix_.find(name);
  return it == var_ix_.end() ? -1 : it->second;
}

int MilpModel::row_index(const std::string& name) const {
  auto it = row_ix_.find(name);
  return it == row_ix_.end() ? -1 : it->second;
}

void MilpModel::reindex() {
  var_ix_.clear();
  row_ix_.clear();
  for (std::size_t i = 0; i < vars.size(); ++i) var_ix_.emplace(vars[i].name, static_cast<int>(i));
  for (std::size_t i = 0; i < rows.size(); ++i) row_ix_.emplace(rows[i].name, static_cast<int>(i));
}

MilpCounts count_model(const MilpModel& m) {
  MilpCounts c;
  c.variables = m.vars.size();
  for (const MilpVar& v : m.vars) c.binaries += v.type == VarType::binary;
  c.constraints = m.rows.size();
  for (const MilpRow& r : m.rows) ++c.rows_by_tag[tag_of(r.name)];
  return c;
}

MilpModel build_milp(const Evaluator& ev, const std::optional<Placement>& warm_start, int threads) {
  return Builder(ev, threads).build(warm_start);
}

void write_lp(const MilpModel& m, std::ostream& out) {
  out << "\\ dimfac location-allocation model\n";
  for (const std::string& c : m.comments) out << "\\ " << c << '\n';
  out << "Minimize\n obj:";
  write_terms(out, m.objective, m);
  out << "\nSubject To\n";
  for (const MilpRow& r : m.rows) {
    out << ' ' << r.name << ':';
    write_terms(out, r.terms, m);
    out << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << num(r.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const MilpVar& v : m.vars) {
    if (v.type == VarType::binary) continue;
    const bool lo_free = v.lb <= -kInf;
    const bool hi_free = v.ub >= kInf;
    if (v.lb == v.ub) out << ' ' << v.name << " = " << num(v.lb) << '\n';
    else if (lo_free && hi_free) out << ' ' << v.name << " free\n";
    else if (v.lb != 0.0 || !hi_free)
      out << ' ' << (lo_free ? "-inf" : num(v.lb)) << " <= " << v.name << " <= "
          << (hi_free ? "inf" : num(v.ub)) << '\n';
  }
  out << "Binary\n";
  for (const MilpVar& v : m.vars)
    if (v.type == VarType::binary) out << ' ' << v.name << '\n';
  out << "End\n";
}

MilpModel read_lp(std::istream& in) {
  MilpModel m;
  LpParser parser(m);
  Section sec = Section::none;
  std::map<Section, std::vector<std::pair<Token, std::size_t>>> toks;
  std::vector<Section> order;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto bs = line.find('\\');
    if (bs != std::string::npos) {
      if (sec == Section::none || sec == Section::objective) {
        std::string c = line.substr(bs + 1);
        if (!c.empty() && c[0] == ' ') c.erase(0, 1);
        if (c != "dimfac location-allocation model") m.comments.push_back(c);
      }
      line.erase(bs);
    }
    if (auto s = section_keyword(line)) {
      sec = *s;
      order.push_back(sec);
      if (sec == Section::end) break;
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (sec == Section::none) lp_error("text before the objective section", ln);
    tokenize(line, ln, toks[sec]);
  }
  if (sec != Section::end) lp_error("missing End", ln);
  if (order.empty() || order.front() != Section::objective) lp_error("missing Minimize section", ln);
  // Sections are parsed in file order so variables are numbered by first
  // appearance.
  for (Section s : order) {
    auto it = toks.find(s);
    if (it == toks.end()) continue;
    switch (s) {
      case Section::objective: parser.objective(it->second); break;
      case Section::constraints: parser.constraints(it->second); break;
      case Section::bounds: parser.bounds(it->second); break;
      case Section::binary: parser.binaries(it->second); break;
      case Section::general:
        lp_error("general integer variables are not supported", it->second.front().second);
      default: break;
    }
    toks.erase(it);
  }
  m.reindex();
  return m;
}

ExportStats export_milp_lp(const Evaluator& ev, const std::string& path,
                           const std::optional<Placement>& warm_start, int threads) {
  ExportStats st;
  const MilpModel m = build_milp(ev, warm_start, threads);
  st.counts = count_model(m);
  st.big_m = export_big_m(ev, threads);
  if (st.counts.constraints > kLargeModelRows)
    st.warnings.push_back(fmt::format("model has {} constraints; external solvers may struggle",
                                      st.counts.constraints));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, fmt::format("cannot open '{}' for writing", path));
  write_lp(m, out);
  out.flush();
  if (!out) throw Error(Errc::io, fmt::format("write to '{}' failed", path));
  return st;
}

std::vector<double> complete_at_placement(const MilpModel& m, const DiscretizedInstance& di,
                                          const Placement& p) {
  const Names names(di);
  const int rho = di.rho();
  if (static_cast<int>(p.size()) != rho)
    throw Error(Errc::invalid_argument, fmt::format("placement has {} cells, expected {}", p.size(), rho));
  auto need_var = [&](const std::string& n) {
    const int v = m.var_index(n);
    if (v < 0) throw Error(Errc::mismatch, fmt::format("model has no variable {}", n));
    return v;
  };
  auto need_row = [&](const std::string& n) -> const MilpRow& {
    const int r = m.row_index(n);
    if (r < 0) throw Error(Errc::mismatch, fmt::format("model has no row {}", n));
    return m.rows[static_cast<std::size_t>(r)];
  };

  std::vector<double> x(m.vars.size(), 0.0);
  for (std::size_t v = 0; v < m.vars.size(); ++v)
    if (m.vars[v].lb > 0.0 && m.vars[v].lb == m.vars[v].ub) x[v] = m.vars[v].lb;
  for (int i = 0; i < rho; ++i) x[static_cast<std::size_t>(need_var(names.theta(i, p[static_cast<std::size_t>(i)])))] = 1.0;

  // Allocation: covered cells take no facility; otherwise the facility with
  // the smallest A5 capacity, lowest index first.
  for (int c = 0; c < di.size(); ++c) {
    const CellIndex cell = di.cells[static_cast<std::size_t>(c)];
    const std::string cn = names.cell(cell);
    const MilpRow& a4 = need_row("A4_" + cn);
    const int pv = need_var(names.phi(cell));
    std::vector<const MilpRow*> local{&a4};
    std::vector<int> tau(static_cast<std::size_t>(rho));
    std::vector<double> cap(static_cast<std::size_t>(rho));
    for (int i = 0; i < rho; ++i) {
      tau[static_cast<std::size_t>(i)] = need_var(names.tau(i, cell));
      const MilpRow& a5 = need_row("A5_" + names.fac(i) + "_" + cn);
      cap[static_cast<std::size_t>(i)] = a5.rhs - row_activity(a5, x);
      local.push_back(&a5);
      local.push_back(&need_row("A6L_" + names.fac(i) + "_" + cn));
      local.push_back(&need_row("A6U_" + names.fac(i) + "_" + cn));
    }
    auto feasible_here = [&] {
      return std::all_of(local.begin(), local.end(), [&](const MilpRow* r) { return row_ok(*r, x, 1e-9); });
    };
    if (row_activity(a4, x) > 0.5) {
      x[static_cast<std::size_t>(pv)] = 0.0;
      if (!feasible_here())
        throw Error(Errc::mismatch, fmt::format("covered cell ({}, {}) admits no feasible completion", cell.k, cell.l));
      continue;
    }
    std::vector<int> cand(static_cast<std::size_t>(rho));
    for (int i = 0; i < rho; ++i) cand[static_cast<std::size_t>(i)] = i;
    std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
      return cap[static_cast<std::size_t>(a)] < cap[static_cast<std::size_t>(b)];
    });
    bool done = false;
    for (int i : cand) {
      const int tv = tau[static_cast<std::size_t>(i)];
      x[static_cast<std::size_t>(tv)] = 1.0;
      x[static_cast<std::size_t>(pv)] = 0.0;
      x[static_cast<std::size_t>(pv)] = solve_for(need_row("A6U_" + names.fac(i) + "_" + cn), pv, x);
      if (feasible_here()) {
        done = true;
        break;
      }
      x[static_cast<std::size_t>(tv)] = 0.0;
    }
    if (!done)
      throw Error(Errc::mismatch, fmt::format("cell ({}, {}) admits no feasible allocation", cell.k, cell.l));
  }

  // Cost blocks.
  for (const MilpRow& r : m.rows) {
    if (r.name.rfind("X_", 0) != 0) continue;
    const std::string b = r.name.substr(2);
    const int xv = need_var("x_" + b);
    const double xb = solve_for(r, xv, x);
    x[static_cast<std::size_t>(xv)] = xb;
    if (const int z = m.var_index("z_" + b); z >= 0) {
      double best = -kInf;
      for (std::size_t s = 0;; ++s) {
        const int e = m.row_index(fmt::format("E_{}_{}", b, s));
        if (e < 0) break;
        best = std::max(best, solve_for(m.rows[static_cast<std::size_t>(e)], z, x));
      }
      x[static_cast<std::size_t>(z)] = std::max(0.0, best);
      continue;
    }
    const int vr = m.row_index("V_" + b);
    if (vr < 0) continue;
    const MilpRow& val = m.rows[static_cast<std::size_t>(vr)];
    std::size_t nseg = 0;
    while (m.var_index(fmt::format("y_{}_{}", b, nseg)) >= 0) ++nseg;
    auto coef = [&](int v) {
      for (const LinTerm& t : val.terms)
        if (t.var == v) return -t.coef;
      throw Error(Errc::mismatch, fmt::format("row {} misses a weight", val.name));
    };
    bool placed = false;
    for (std::size_t s = 0; s < nseg && !placed; ++s) {
      const int wl = need_var(fmt::format("wl_{}_{}", b, s));
      const int wr = need_var(fmt::format("wr_{}_{}", b, s));
      const double lo = coef(wl), hi = coef(wr);
      const double xc = s == 0 ? std::max(xb, lo) : xb;
      if (xc < lo || (xc > hi && s + 1 < nseg)) continue;
      const double t = std::clamp((xc - lo) / (hi - lo), 0.0, 1.0);
      x[static_cast<std::size_t>(need_var(fmt::format("y_{}_{}", b, s)))] = 1.0;
      x[static_cast<std::size_t>(wl)] = 1.0 - t;
      x[static_cast<std::size_t>(wr)] = t;
      placed = true;
    }
    if (!placed) throw Error(Errc::mismatch, fmt::format("argument of block {} lies outside its breakpoints", b));
  }
  return x;
}

std::optional<std::string> check_model_feasibility(const MilpModel& m, const std::vector<double>& x,
                                                   double tol) {
  if (x.size() != m.vars.size()) return std::string("value vector has the wrong size");
  for (std::size_t v = 0; v < m.vars.size(); ++v) {
    const MilpVar& mv = m.vars[v];
    const double s = tol * std::max(1.0, std::fabs(x[v]));
    if (x[v] < mv.lb - s || x[v] > mv.ub + s) return "bound of " + mv.name;
    if (mv.type == VarType::binary && std::fabs(x[v] - std::round(x[v])) > tol)
      return "integrality of " + mv.name;
  }
  for (const MilpRow& r : m.rows)
    if (!row_ok(r, x, tol)) return r.name;
  return std::nullopt;
}

double model_objective(const MilpModel& m, const std::vector<double>& x) {
  double s = 0.0;
  for (const LinTerm& t : m.objective) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

double evaluate_model_at_placement(const MilpModel& m, const DiscretizedInstance& di,
                                   const Placement& p) {
  const std::vector<double> x = complete_at_placement(m, di, p);
  if (auto bad = check_model_feasibility(m, x))
    throw Error(Errc::mismatch, "completed model violates " + *bad);
  return model_objective(m, x);
}

}  // namespace dimfac
