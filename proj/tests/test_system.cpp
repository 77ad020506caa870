#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "eqsolve/parser.hpp"
#include "eqsolve/system.hpp"
#include "support/generators.hpp"

using namespace eqsolve;
using eqsolve::testing::random_expression;

TEST_CASE("parse a minimal file") {
  EquationSystem s = parse_system("var x\neq e1: x - 3 = 0\n");
  REQUIRE(s.unknowns == std::vector<std::string>{"x"});
  REQUIRE(s.equations.size() == 1);
  REQUIRE(s.equations[0].name == "e1");
  REQUIRE_FALSE(s.structural_only);
  // rhs 0 adds no subtraction node: the expression is x - 3 itself.
  const Expr& e = s.equations[0].expr;
  REQUIRE(e->kind == ExprNode::Kind::Binary);
  REQUIRE(e->binary_op == BinaryOp::Subtract);
  REQUIRE(e->a->kind == ExprNode::Kind::Variable);
  REQUIRE(e->b->kind == ExprNode::Kind::Constant);
  REQUIRE(evaluate(s, e, {{"x", 3.0}}) == 0.0);
}

TEST_CASE("general right-hand sides are normalized to a difference") {
  EquationSystem s = parse_system("var x y\neq e: x^2 = y + 1\n");
  const Expr& e = s.equations[0].expr;
  REQUIRE(e->binary_op == BinaryOp::Subtract);
  REQUIRE(evaluate(s, e, {{"x", 2.0}, {"y", 3.0}}) == 0.0);
}

TEST_CASE("mixing expression and structural equations is rejected") {
  REQUIRE_THROWS_MATCHES(
      parse_system("var x y\nparam a=2\neq e1: x^2 + a*y = 1\neq e2: uses x\n"), ParseError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("cannot mix")));
  REQUIRE_THROWS_MATCHES(
      parse_system("var x y\neq e1: uses x\neq e2: x - y = 0\n"), ParseError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("cannot mix")));
}

TEST_CASE("parameters do not appear in incidence") {
  EquationSystem s =
      parse_system("var xC yC\nparam xA=0 yA=0\neq dAC: (xC-xA)^2 + (yC-yA)^2 - 25 = 0\n");
  auto inc = incidence(s);
  REQUIRE(inc.size() == 1);
  REQUIRE(inc[0].first == 0);
  REQUIRE(inc[0].second == std::vector<int>{0, 1});
  REQUIRE(evaluate(s, s.equations[0].expr, {{"xC", 3.0}, {"yC", 4.0}}) == 0.0);
}

TEST_CASE("structural-only files parse into incidence lists") {
  EquationSystem s = parse_system("var a b c\neq e1: uses a b\neq e2: uses c c b\n");
  REQUIRE(s.structural_only);
  auto inc = incidence(s);
  REQUIRE(inc[0].second == std::vector<int>{0, 1});
  REQUIRE(inc[1].second == std::vector<int>{1, 2});  // deduplicated, sorted
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_system("var x\neq e1: x +\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    REQUIRE(e.line() == 2);
    REQUIRE(e.column() > 1);
  }
}

TEST_CASE("undeclared identifiers are rejected") {
  REQUIRE_THROWS_MATCHES(
      parse_system("var x\neq e: x + q = 0\n"), ParseError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("undeclared identifier")));
}

TEST_CASE("duplicate names are rejected") {
  REQUIRE_THROWS_AS(parse_system("var x x\n"), ParseError);
  REQUIRE_THROWS_AS(parse_system("var x\nparam x=1\n"), ParseError);
  REQUIRE_THROWS_AS(parse_system("var x\neq e: x = 0\neq e: x = 1\n"), ParseError);
}

TEST_CASE("non-integer exponents are rejected") {
  REQUIRE_THROWS_MATCHES(
      parse_system("var x\neq e: x^2.5 = 0\n"), ParseError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("non-integer exponent")));
  REQUIRE_THROWS_MATCHES(
      parse_system("var x y\neq e: x^y = 0\n"), ParseError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("integer literal")));
}

TEST_CASE("exponent chains fold right-associatively") {
  EquationSystem s = parse_system("var x\neq e: x^2^3 = 0\n");
  REQUIRE(s.equations[0].expr->kind == ExprNode::Kind::Power);
  REQUIRE(s.equations[0].expr->exponent == 8);
  REQUIRE_THROWS_AS(parse_system("var x\neq e: x^2^-1 = 0\n"), ParseError);
}

TEST_CASE("negative integer exponents parse") {
  EquationSystem s = parse_system("var x\neq e: x^-2 = 0\n");
  REQUIRE(s.equations[0].expr->kind == ExprNode::Kind::Power);
  REQUIRE(s.equations[0].expr->exponent == -2);
  REQUIRE(evaluate(s, s.equations[0].expr, {{"x", 2.0}}) == 0.25);
}

TEST_CASE("domains parse and default") {
  EquationSystem s = parse_system("var x y\ndomain x in [-2, 3.5]\neq e: x + y = 0\n");
  REQUIRE(s.domains[0] == Interval{-2.0, 3.5});
  REQUIRE(s.domains[1] == kDefaultDomain);
  REQUIRE_THROWS_AS(parse_system("var x\ndomain x in [3, 2]\n"), ParseError);
  REQUIRE_THROWS_AS(parse_system("param a=1\ndomain a in [0, 1]\n"), ParseError);
  REQUIRE_THROWS_AS(parse_system("var x\ndomain x in [0, 1]\ndomain x in [0, 2]\n"), ParseError);
}

TEST_CASE("reserved words cannot be declared") {
  REQUIRE_THROWS_AS(parse_system("var sin\n"), ParseError);
  REQUIRE_THROWS_AS(parse_system("param uses=1\n"), ParseError);
}

TEST_CASE("comments and blank lines are ignored") {
  EquationSystem s = parse_system("# header\n\nvar x  # trailing\neq e: x = 0  # done\n");
  REQUIRE(s.unknowns.size() == 1);
  REQUIRE(s.equations.size() == 1);
}

TEST_CASE("incidence of a constant equation is empty") {
  EquationSystem s = parse_system("eq c: 3 = 0\n");
  auto inc = incidence(s);
  REQUIRE(inc.size() == 1);
  REQUIRE(inc[0].second.empty());
}

TEST_CASE("incidence deduplicates repeated occurrences") {
  EquationSystem s = parse_system("var x y\neq e: x + x*y = 0\n");
  REQUIRE(incidence(s)[0].second == std::vector<int>{0, 1});
}

TEST_CASE("incidence of a distance chain lists the mentioned unknowns") {
  EquationSystem s = parse_system(
      "var xC yC xD yD\nparam xA=0 yA=0\n"
      "eq c1: (xC-xA)^2 + (yC-yA)^2 = 169\n"
      "eq d1: (xD-xC)^2 + (yD-yC)^2 = 25\n");
  auto inc = incidence(s);
  REQUIRE(inc[0].second == std::vector<int>{0, 1});
  REQUIRE(inc[1].second == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("evaluate reports domain errors") {
  EquationSystem s = parse_system("var x y\neq e: x / y = 0\n");
  REQUIRE_THROWS_AS(evaluate(s, s.equations[0].expr, {{"x", 1.0}, {"y", 0.0}}), EvalError);
  EquationSystem t = parse_system("var x\neq e: sqrt(x) = 0\n");
  REQUIRE_THROWS_AS(evaluate(t, t.equations[0].expr, {{"x", -1.0}}), EvalError);
  REQUIRE_THROWS_AS(evaluate(t, t.equations[0].expr, {}), Error);  // unbound unknown
}

TEST_CASE("differentiate power rule") {
  EquationSystem s = parse_system("var x\neq e: x^2 = 0\n");
  Expr d = differentiate(s, s.equations[0].expr, "x");
  REQUIRE(to_string(s, d) == "2 * x");
}

TEST_CASE("differentiate product and chain rule") {
  EquationSystem s = parse_system("var x y\neq e: sin(x)*y = 0\n");
  Expr d = differentiate(s, s.equations[0].expr, "x");
  REQUIRE(to_string(s, d) == "cos(x) * y");
}

TEST_CASE("differentiate absent variable gives zero") {
  EquationSystem s = parse_system("var x y\neq e: x - 3 = 0\n");
  Expr d = differentiate(s, s.equations[0].expr, "y");
  REQUIRE(is_constant(d, 0.0));
}

TEST_CASE("symbolic derivatives match central finite differences") {
  std::mt19937 rng(20240401);
  std::uniform_real_distribution<double> point_dist(-2.0, 2.0);
  const double h = 1e-6;
  int done = 0, attempts = 0;
  while (done < 400 && ++attempts < 40000) {
    Expr e = random_expression(rng, 4, 2, 1, /*guarded=*/true);
    double p0 = point_dist(rng), p1 = point_dist(rng);
    double params[] = {point_dist(rng)};
    VarRef v{VarKind::Unknown, std::uniform_int_distribution<int>(0, 1)(rng)};
    Expr d = differentiate(e, v);
    auto eval_at = [&](double shift) -> std::optional<double> {
      double unk[] = {p0 + (v.index == 0 ? shift : 0.0), p1 + (v.index == 1 ? shift : 0.0)};
      try {
        double r = evaluate_raw(e, unk, params);
        if (!std::isfinite(r) || std::abs(r) > 1e5) return std::nullopt;
        return r;
      } catch (const EvalError&) {
        return std::nullopt;
      }
    };
    auto fp = eval_at(h), fm = eval_at(-h), f0 = eval_at(0.0);
    if (!fp || !fm || !f0) continue;
    double unk[] = {p0, p1};
    double sym;
    try {
      sym = evaluate_raw(d, unk, params);
    } catch (const EvalError&) {
      continue;
    }
    if (!std::isfinite(sym) || std::abs(sym) > 1e5) continue;
    double fd = (*fp - *fm) / (2 * h);
    ++done;
    REQUIRE_THAT(sym, Catch::Matchers::WithinAbs(fd, 1e-4 * (1.0 + std::abs(sym))));
  }
  REQUIRE(done >= 400);
}

TEST_CASE("interval even powers use the envelope rule") {
  EquationSystem s = parse_system("var x\neq e: x^2 = 0\n");
  Interval r = interval_evaluate(s, s.equations[0].expr, {{"x", Interval{-2.0, 3.0}}});
  REQUIRE(r.lo <= 0.0);
  REQUIRE(r.hi >= 9.0);
  REQUIRE(r.lo >= -1e-10);
  REQUIRE(r.hi <= 9.0 + 1e-10);
}

TEST_CASE("interval dependency keeps x - x wide") {
  EquationSystem s = parse_system("var x\neq e: x - x = 0\n");
  Interval r = interval_evaluate(s, s.equations[0].expr, {{"x", Interval{0.0, 1.0}}});
  REQUIRE(r.lo <= -1.0 + 1e-12);
  REQUIRE(r.hi >= 1.0 - 1e-12);
}

TEST_CASE("interval sine over the first half period") {
  EquationSystem s = parse_system("var x\neq e: sin(x) = 0\n");
  Interval r = interval_evaluate(s, s.equations[0].expr,
                                 {{"x", Interval{0.0, 3.14159265358979323846}}});
  REQUIRE(r.lo <= 0.0);
  REQUIRE(r.hi >= 1.0);
  REQUIRE(r.lo >= -1e-10);
  REQUIRE(r.hi <= 1.0 + 1e-10);
}

TEST_CASE("interval division by a zero-straddling interval asks for a split") {
  EquationSystem s = parse_system("var x y\neq e: x / y = 0\n");
  try {
    interval_evaluate(s, s.equations[0].expr,
                      {{"x", Interval{1.0, 2.0}}, {"y", Interval{-1.0, 1.0}}});
    FAIL("expected a split-required error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::SplitRequired);
  }
}

TEST_CASE("interval sqrt of an entirely negative interval is empty") {
  EquationSystem s = parse_system("var x\neq e: sqrt(x) = 0\n");
  Interval r = interval_evaluate(s, s.equations[0].expr, {{"x", Interval{-4.0, -1.0}}});
  REQUIRE(r.is_empty());
}

TEST_CASE("point evaluation lies inside the interval evaluation") {
  std::mt19937 rng(20240402);
  std::uniform_real_distribution<double> center_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> width_dist(0.01, 0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int done = 0, attempts = 0;
  while (done < 1000 && ++attempts < 100000) {
    Expr e = random_expression(rng, 4, 2, 1, /*guarded=*/false);
    Interval box[2];
    double pt[2];
    for (int i = 0; i < 2; ++i) {
      double c = center_dist(rng), w = width_dist(rng);
      box[i] = {c - w, c + w};
      pt[i] = c - w + 2 * w * unit(rng);
    }
    double params[] = {center_dist(rng)};
    Interval param_iv[] = {Interval::point(params[0])};
    double value;
    try {
      value = evaluate_raw(e, pt, params);
    } catch (const EvalError&) {
      continue;
    }
    if (!std::isfinite(value)) continue;
    auto range = try_interval_evaluate_raw(e, box, param_iv);
    if (!range) continue;  // split required
    ++done;
    REQUIRE_FALSE(range->is_empty());
    REQUIRE(range->lo <= value);
    REQUIRE(range->hi >= value);
  }
  REQUIRE(done >= 1000);
}

TEST_CASE("print then parse reproduces a system") {
  std::string text =
      "var x y\n"
      "param a=2 b=-0.5\n"
      "eq e1: (x - a)^2 + sin(y)/b = 1 + x*y\n"
      "eq e2: -x^3 + sqrt(y + 2) = 0\n"
      "domain x in [-5, 5]\n";
  EquationSystem s = parse_system(text);
  std::string printed = print_system(s);
  EquationSystem t = parse_system(printed);
  REQUIRE(systems_equal(s, t));
  REQUIRE(print_system(t) == printed);
}

TEST_CASE("print then parse reproduces structural files") {
  EquationSystem s = parse_system("var a b\neq e1: uses a b\neq e2: uses b\n");
  EquationSystem t = parse_system(print_system(s));
  REQUIRE(systems_equal(s, t));
}

TEST_CASE("print then parse round-trips random expressions") {
  std::mt19937 rng(20240403);
  EquationSystem base = parse_system("var u0 u1\nparam p0=1\neq seed: u0 = 0\n");
  for (int i = 0; i < 300; ++i) {
    Expr e = random_expression(rng, 5, 2, 1, /*guarded=*/false);
    std::string text = to_string(base, e);
    EquationSystem sys = parse_system("var u0 u1\nparam p0=1\neq e: " + text + " = 0\n");
    REQUIRE(expr_equal(sys.equations[0].expr, e));
  }
}

TEST_CASE("perturbing a listed unknown changes the value") {
  EquationSystem s = parse_system("var x y\nparam a=3\neq e: x^2 + a = 0\n");
  auto inc = incidence(s);
  REQUIRE(inc[0].second == std::vector<int>{0});  // y unlisted, a excluded
  double base = evaluate(s, s.equations[0].expr, {{"x", 1.0}, {"y", 0.0}});
  double moved = evaluate(s, s.equations[0].expr, {{"x", 1.5}, {"y", 0.0}});
  REQUIRE(base != moved);
  double y_moved = evaluate(s, s.equations[0].expr, {{"x", 1.0}, {"y", 9.0}});
  REQUIRE(base == y_moved);
}
