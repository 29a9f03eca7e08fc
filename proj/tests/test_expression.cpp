#include "worldfn/core.hpp"
#include "worldfn/expression.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace worldfn;

namespace {
Real eval(const std::string& text, std::vector<std::string> vars = {}, std::vector<Real> vals = {}) {
  return Expression::parse(text, std::move(vars))(vals);
}
}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2 * 3") == 7);
  CHECK(eval("(1 + 2) * 3") == 9);
  CHECK(eval("2 ^ 3 ^ 2") == 512);
  CHECK(eval("-2 ^ 2") == -4);
  CHECK(eval("8 / 4 / 2") == 1);
  CHECK(eval("10 - 4 - 3") == 3);
  CHECK(eval("2 * -3") == -6);
}

TEST_CASE("functions and constants") {
  CHECK(static_cast<double>(eval("sin(pi / 2)")) == doctest::Approx(1.0));
  CHECK(static_cast<double>(eval("log(e)")) == doctest::Approx(1.0));
  CHECK(static_cast<double>(eval("atan2(1, 1)")) == doctest::Approx(M_PI / 4));
  CHECK(eval("max(2, 5) - min(2, 5)") == 3);
  CHECK(eval("pow(2, 10)") == 1024);
  CHECK(eval("abs(-3.5)") == 3.5);
  CHECK(static_cast<double>(eval("sqrt(2)^2")) == doctest::Approx(2.0));
  CHECK(eval("1.5e2") == 150);
}

TEST_CASE("variables") {
  const auto e = Expression::parse("s + 0.5*s^2 + x0*y1", {"s", "x0", "y1"});
  std::vector<Real> v{2, 3, 4};
  CHECK(e(v) == 2 + 2 + 12);
  CHECK(e.uses(0));
  CHECK(e.uses(2));
  const auto f = Expression::parse("x1", {"x0", "x1"});
  CHECK_FALSE(f.uses(0));
}

TEST_CASE("syntax errors are validation errors") {
  CHECK_THROWS_AS(Expression::parse("1 +", {}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("(1", {}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("foo(1)", {}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("q + 1", {"s"}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("sin(1, 2)", {}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("1 2", {}), ValidationError);
  CHECK_THROWS_AS(Expression::parse("", {}), ValidationError);
}

TEST_CASE("deep nesting evaluates") {
  std::string t;
  for (int i = 0; i < 40; ++i) t += "(1+";
  t += "0";
  for (int i = 0; i < 40; ++i) t += ")";
  CHECK(eval(t) == 40);
}
