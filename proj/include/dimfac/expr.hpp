// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// A small arithmetic language for densities D(x,y), B(x,y) and utility scale
// functions f(t). Grammar, lowest precedence first:
//
//   expr       := additive (cmp-op additive)?
//   additive   := term (('+' | '-') term)*
//   term       := unary (('*' | '/') unary)*
//   unary      := '-' unary | primary
//   primary    := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Comparisons produce 1.0 or 0.0. if(c, a, b) evaluates only the taken branch.
// Division by zero, sqrt of a negative and non-finite pow results are domain
// errors rather than NaNs.

#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dimfac {

enum class ExprOp {
  constant,
  variable,
  neg,
  add,
  sub,
  mul,
  div,
  lt,
  le,
  gt,
  ge,
  min,
  max,
  abs,
  sqrt,
  pow,
  cond,
};

struct ExprNode {
  ExprOp op = ExprOp::constant;
  double value = 0.0;  // constant
  int slot = -1;       // variable: index into the declared variable list
  std::vector<std::shared_ptr<const ExprNode>> args;
};

class Expr {
 public:
  Expr() = default;

  // Parses `text` over the declared variable names. Throws SyntaxError or
  // Error(Errc::unknown_variable).
  static Expr parse(std::string_view text, std::vector<std::string> variables);

  // Shorthand for a literal-only expression.
  static Expr constant(double value, std::vector<std::string> variables = {});

  // Values are positional, matching variables().
  double evaluate(std::span<const double> values) const;
  double evaluate(const std::map<std::string, double>& bindings) const;

  // Fully parenthesized canonical text; parse(to_string()) is structurally
  // equal to *this.
  std::string to_string() const;

  const std::vector<std::string>& variables() const { return variables_; }
  bool empty() const { return root_ == nullptr; }

  // True when the tree has no variables.
  bool is_constant() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> root_;
  std::vector<std::string> variables_;
};

}  // namespace dimfac
