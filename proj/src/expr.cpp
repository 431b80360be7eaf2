// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "dimfac/error.hpp"

namespace dimfac {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(ExprOp op, std::vector<NodePtr> args) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

NodePtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::constant;
  n->value = v;
  return n;
}

struct FunctionInfo {
  std::string_view name;
  ExprOp op;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"min", ExprOp::min, 2},   {"max", ExprOp::max, 2},
    {"abs", ExprOp::abs, 1},   {"sqrt", ExprOp::sqrt, 1},
    {"pow", ExprOp::pow, 2},   {"if", ExprOp::cond, 3},
};

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "empty expression");
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw SyntaxError(pos_, fmt::format("unexpected '{}'", text_[pos_]));
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw SyntaxError(pos_, fmt::format("expected '{}'", c));
    ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_additive();
    ExprOp op;
    // Two-character operators first.
    if (accept("<="))
      op = ExprOp::le;
    else if (accept(">="))
      op = ExprOp::ge;
    else if (accept("<"))
      op = ExprOp::lt;
    else if (accept(">"))
      op = ExprOp::gt;
    else
      return lhs;
    NodePtr rhs = parse_additive();
    return make(op, {lhs, rhs});
  }

  NodePtr parse_additive() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept("+"))
        lhs = make(ExprOp::add, {lhs, parse_term()});
      else if (accept("-"))
        lhs = make(ExprOp::sub, {lhs, parse_term()});
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept("*"))
        lhs = make(ExprOp::mul, {lhs, parse_unary()});
      else if (accept("/"))
        lhs = make(ExprOp::div, {lhs, parse_unary()});
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept("-")) return make(ExprOp::neg, {parse_unary()});
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_name();
    throw SyntaxError(pos_, fmt::format("unexpected '{}'", c));
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first)
      throw SyntaxError(start, "malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_constant(v);
  }

  NodePtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      for (const auto& f : kFunctions) {
        if (f.name != name) continue;
        ++pos_;
        std::vector<NodePtr> args;
        args.push_back(parse_expr());
        while (accept(",")) args.push_back(parse_expr());
        expect(')');
        if (static_cast<int>(args.size()) != f.arity)
          throw SyntaxError(start, fmt::format("{}() takes {} argument(s)",
                                               name, f.arity));
        return make(f.op, std::move(args));
      }
      throw SyntaxError(start, fmt::format("unknown function '{}'", name));
    }

    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = std::make_shared<ExprNode>();
        n->op = ExprOp::variable;
        n->slot = static_cast<int>(i);
        return n;
      }
    }
    throw Error(Errc::unknown_variable,
                fmt::format("unknown variable '{}' at offset {}", name, start));
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_error(const char* what) {
  throw Error(Errc::domain, what);
}

double eval(const ExprNode& n, std::span<const double> v) {
  switch (n.op) {
    case ExprOp::constant:
      return n.value;
    case ExprOp::variable:
      return v[static_cast<std::size_t>(n.slot)];
    case ExprOp::neg:
      return -eval(*n.args[0], v);
    case ExprOp::add:
      return eval(*n.args[0], v) + eval(*n.args[1], v);
    case ExprOp::sub:
      return eval(*n.args[0], v) - eval(*n.args[1], v);
    case ExprOp::mul:
      return eval(*n.args[0], v) * eval(*n.args[1], v);
    case ExprOp::div: {
      const double num = eval(*n.args[0], v);
      const double den = eval(*n.args[1], v);
      if (den == 0.0) domain_error("division by zero");
      return num / den;
    }
    case ExprOp::lt:
      return eval(*n.args[0], v) < eval(*n.args[1], v) ? 1.0 : 0.0;
    case ExprOp::le:
      return eval(*n.args[0], v) <= eval(*n.args[1], v) ? 1.0 : 0.0;
    case ExprOp::gt:
      return eval(*n.args[0], v) > eval(*n.args[1], v) ? 1.0 : 0.0;
    case ExprOp::ge:
      return eval(*n.args[0], v) >= eval(*n.args[1], v) ? 1.0 : 0.0;
    case ExprOp::min:
      return std::fmin(eval(*n.args[0], v), eval(*n.args[1], v));
    case ExprOp::max:
      return std::fmax(eval(*n.args[0], v), eval(*n.args[1], v));
    case ExprOp::abs:
      return std::fabs(eval(*n.args[0], v));
    case ExprOp::sqrt: {
      const double a = eval(*n.args[0], v);
      if (a < 0.0) domain_error("sqrt of negative value");
      return std::sqrt(a);
    }
    case ExprOp::pow: {
      const double r = std::pow(eval(*n.args[0], v), eval(*n.args[1], v));
      if (!std::isfinite(r)) domain_error("pow result is not finite");
      return r;
    }
    case ExprOp::cond:
      return eval(*n.args[0], v) != 0.0 ? eval(*n.args[1], v)
                                        : eval(*n.args[2], v);
  }
  return 0.0;
}

const char* infix_symbol(ExprOp op) {
  switch (op) {
    case ExprOp::add: return "+";
    case ExprOp::sub: return "-";
    case ExprOp::mul: return "*";
    case ExprOp::div: return "/";
    case ExprOp::lt: return "<";
    case ExprOp::le: return "<=";
    case ExprOp::gt: return ">";
    case ExprOp::ge: return ">=";
    default: return nullptr;
  }
}

const char* function_name(ExprOp op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name.data();
  return nullptr;
}

void print(const ExprNode& n, const std::vector<std::string>& vars,
           std::string& out) {
  switch (n.op) {
    case ExprOp::constant:
      // Negative literals only arise from Expr::constant; keep them reparsable.
      if (n.value < 0.0 || std::signbit(n.value))
        out += fmt::format("(-{})", -n.value);
      else
        out += fmt::format("{}", n.value);
      return;
    case ExprOp::variable:
      out += vars[static_cast<std::size_t>(n.slot)];
      return;
    case ExprOp::neg:
      out += "(-";
      print(*n.args[0], vars, out);
      out += ")";
      return;
    default:
      break;
  }
  if (const char* sym = infix_symbol(n.op)) {
    out += "(";
    print(*n.args[0], vars, out);
    out += " ";
    out += sym;
    out += " ";
    print(*n.args[1], vars, out);
    out += ")";
    return;
  }
  out += function_name(n.op);
  out += "(";
  for (std::size_t i = 0; i < n.args.size(); ++i) {
    if (i) out += ", ";
    print(*n.args[i], vars, out);
  }
  out += ")";
}

bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  if (a.op == ExprOp::constant) return a.value == b.value;
  if (a.op == ExprOp::variable) return a.slot == b.slot;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  return true;
}

bool has_variable(const ExprNode& n) {
  if (n.op == ExprOp::variable) return true;
  for (const auto& a : n.args)
    if (has_variable(*a)) return true;
  return false;
}

}  // namespace

Expr Expr::parse(std::string_view text, std::vector<std::string> variables) {
  Expr e;
  e.variables_ = std::move(variables);
  e.root_ = Parser(text, e.variables_).parse_all();
  return e;
}

Expr Expr::constant(double value, std::vector<std::string> variables) {
  Expr e;
  e.variables_ = std::move(variables);
  e.root_ = make_constant(value);
  return e;
}

double Expr::evaluate(std::span<const double> values) const {
  if (!root_) throw Error(Errc::invalid_argument, "evaluating an empty expression");
  if (values.size() < variables_.size())
    throw Error(Errc::invalid_argument,
                fmt::format("expected {} variable value(s), got {}",
                            variables_.size(), values.size()));
  return eval(*root_, values);
}

double Expr::evaluate(const std::map<std::string, double>& bindings) const {
  std::vector<double> values;
  values.reserve(variables_.size());
  for (const auto& name : variables_) {
    auto it = bindings.find(name);
    if (it == bindings.end())
      throw Error(Errc::invalid_argument,
                  fmt::format("no binding for variable '{}'", name));
    values.push_back(it->second);
  }
  return evaluate(values);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print(*root_, variables_, out);
  return out;
}

bool Expr::is_constant() const { return root_ && !has_variable(*root_); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.variables_ != b.variables_) return false;
  if (!a.root_ || !b.root_) return a.root_ == b.root_;
  return same_tree(*a.root_, *b.root_);
}

}  // namespace dimfac
