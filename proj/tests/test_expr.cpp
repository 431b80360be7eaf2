// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include <cstring>
#include <string>

#include "doctest.h"
#include "dimfac/error.hpp"
#include "dimfac/expr.hpp"
#include "dimfac/rng.hpp"

using namespace dimfac;

namespace {

const std::vector<std::string> kXY{"x", "y"};

double eval_xy(const std::string& s, double x, double y) {
  return Expr::parse(s, kXY).evaluate({{"x", x}, {"y", y}});
}

std::string random_expr(Rng& rng, int depth) {
  if (depth == 0 || rng.below(4) == 0) {
    switch (rng.below(3)) {
      case 0: return "x";
      case 1: return "y";
      default: return std::to_string(rng.below(100)) + "." + std::to_string(rng.below(10));
    }
  }
  const std::string a = random_expr(rng, depth - 1);
  const std::string b = random_expr(rng, depth - 1);
  switch (rng.below(10)) {
    case 0: return a + " + " + b;
    case 1: return a + " - " + b;
    case 2: return a + " * " + b;
    case 3: return a + " / " + b;
    case 4: return "-" + a;
    case 5: return "(" + a + ")";
    case 6: return "min(" + a + ", " + b + ")";
    case 7: return "pow(" + a + "," + b + ")";
    case 8: return "if(" + a + " >= " + b + ", " + a + ", " + b + ")";
    default: return "abs(" + a + ")";
  }
}

}  // namespace

TEST_CASE("literal parses to a constant") {
  const Expr e = Expr::parse("1", kXY);
  CHECK(e.is_constant());
  CHECK(e.evaluate({{"x", 3.0}, {"y", 4.0}}) == 1.0);
}

TEST_CASE("demand body of the half-plane density") {
  const Expr e = Expr::parse("8*(x-0.5)", kXY);
  CHECK_FALSE(e.is_constant());
  CHECK(e.to_string() == "(8 * (x - 0.5))");
  CHECK(e.evaluate({{"x", 0.75}, {"y", 0.0}}) == 2.0);
}

TEST_CASE("unknown variable names the offender") {
  try {
    Expr::parse("x + z", kXY);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_variable);
    CHECK(std::string(e.what()).find("'z'") != std::string::npos);
  }
}

TEST_CASE("conditional density") {
  CHECK(eval_xy("if(x>=0.5, 8*(x-0.5), 0)", 0.75, 0.0) == 2.0);
  CHECK(eval_xy("if(x>=0.5, 8*(x-0.5), 0)", 0.25, 0.0) == 0.0);
  CHECK(eval_xy("sqrt(75*x*x+150*y*y)", 0.0, 0.0) == 0.0);
}

TEST_CASE("precedence") {
  CHECK(eval_xy("1 + 2 * 3", 0, 0) == 7.0);
  CHECK(eval_xy("-2 * 3", 0, 0) == -6.0);
  CHECK(eval_xy("2 - 3 - 4", 0, 0) == -5.0);
  CHECK(eval_xy("8 / 4 / 2", 0, 0) == 1.0);
  CHECK(eval_xy("1 + 2 < 2 + 2", 0, 0) == 1.0);
  CHECK(eval_xy("--x", 3, 0) == 3.0);
  CHECK(eval_xy("x >= y", 1, 1) == 1.0);
  CHECK(eval_xy("x > y", 1, 1) == 0.0);
  CHECK(eval_xy("x <= y", 2, 1) == 0.0);
  CHECK(eval_xy("1e-3 * 1000", 0, 0) == 1.0);
  CHECK(eval_xy("max(x, y) - min(x, y)", 2, 5) == 3.0);
  CHECK(eval_xy("pow(2, 10)", 0, 0) == 1024.0);
  CHECK(eval_xy("abs(-x)", 2, 0) == 2.0);
}

TEST_CASE("if evaluates only the taken branch") {
  CHECK(eval_xy("if(1>0, 1, 1/0)", 0, 0) == 1.0);
  CHECK(eval_xy("if(0, sqrt(-1), 2)", 0, 0) == 2.0);
}

TEST_CASE("domain errors are hard failures") {
  for (const char* s : {"1/0", "sqrt(-1)", "pow(-1, 0.5)", "pow(0, -1)"}) {
    CAPTURE(s);
    try {
      eval_xy(s, 0, 0);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::domain);
    }
  }
}

TEST_CASE("syntax errors carry the byte offset") {
  struct Case {
    const char* text;
    std::size_t offset;
  };
  for (const Case& c : {Case{"1 +", 3}, Case{"(x", 2}, Case{"x y", 2},
                        Case{"foo(1)", 0}, Case{"min(1)", 0}, Case{"", 0},
                        Case{"2 # 3", 2}}) {
    CAPTURE(c.text);
    try {
      Expr::parse(c.text, kXY);
      FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
      CHECK(e.offset() == c.offset);
      CHECK(e.code() == Errc::syntax);
    }
  }
}

TEST_CASE("missing binding is reported") {
  const Expr e = Expr::parse("x + y", kXY);
  CHECK_THROWS_AS(e.evaluate({{"x", 1.0}}), Error);
}

TEST_CASE("pretty-print round-trips to a structurally equal tree") {
  Rng rng(7);
  for (int n = 0; n < 500; ++n) {
    const std::string s = random_expr(rng, 5);
    CAPTURE(s);
    const Expr e = Expr::parse(s, kXY);
    const Expr back = Expr::parse(e.to_string(), kXY);
    CHECK(back == e);
    CHECK(back.to_string() == e.to_string());
  }
  CHECK(Expr::parse(Expr::constant(-2.5, kXY).to_string(), kXY).evaluate(
            {{"x", 0}, {"y", 0}}) == -2.5);
}

TEST_CASE("evaluation is bit-identical on repetition") {
  Rng rng(11);
  for (int n = 0; n < 200; ++n) {
    const Expr e = Expr::parse(random_expr(rng, 4), kXY);
    const double xy[2] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    double first = 0.0;
    bool ok = true;
    try {
      first = e.evaluate(xy);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) continue;
    const double again = e.evaluate(xy);
    CHECK(std::memcmp(&first, &again, sizeof(double)) == 0);
  }
}
