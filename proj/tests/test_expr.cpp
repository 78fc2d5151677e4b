#include <doctest.h>

#include <cmath>

#include "resolvlab/expr.hpp"

using namespace resolvlab;
using resolvlab::expr::Expression;

TEST_CASE("expression grammar: arithmetic and precedence") {
  CHECK(Expression::parse("1 + 2*3").eval(0, 0) == doctest::Approx(7.0));
  CHECK(Expression::parse("(1 + 2)*3").eval(0, 0) == doctest::Approx(9.0));
  CHECK(Expression::parse("2^3^2").eval(0, 0) == doctest::Approx(512.0));   // right assoc
  CHECK(Expression::parse("-x^2").eval(3.0, 0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("2^-1").eval(0, 0) == doctest::Approx(0.5));
  CHECK(Expression::parse("x/n").eval(6.0, 3.0) == doctest::Approx(2.0));
  CHECK(Expression::parse("1.5e2").eval(0, 0) == doctest::Approx(150.0));
}

TEST_CASE("expression grammar: functions") {
  CHECK(Expression::parse("sin(x)").eval(0.5, 0) == doctest::Approx(std::sin(0.5)));
  CHECK(Expression::parse("cos(x)").eval(0.5, 0) == doctest::Approx(std::cos(0.5)));
  CHECK(Expression::parse("exp(-x)").eval(2.0, 0) == doctest::Approx(std::exp(-2.0)));
  CHECK(Expression::parse("abs(x - 3)").eval(1.0, 0) == doctest::Approx(2.0));
  CHECK(Expression::parse("min(x, n)").eval(1.0, 2.0) == doctest::Approx(1.0));
  CHECK(Expression::parse("max(x, n)").eval(1.0, 2.0) == doctest::Approx(2.0));

  // indicator(lo, hi) reads the ambient x: half-open [lo, hi)
  Expression ind = Expression::parse("indicator(0, 1)");
  CHECK(ind.eval(0.0, 0) == doctest::Approx(1.0));
  CHECK(ind.eval(0.999, 0) == doctest::Approx(1.0));
  CHECK(ind.eval(1.0, 0) == doctest::Approx(0.0));
  CHECK(ind.eval(-0.1, 0) == doctest::Approx(0.0));
}

TEST_CASE("expression grammar: reference coefficient shapes") {
  Expression wn = Expression::parse("1 + sin(x)/n");
  CHECK(wn.eval(1.0, 4.0) == doctest::Approx(1.0 + std::sin(1.0) / 4.0));
  Expression qn = Expression::parse("x^2/(1+x^2) + indicator(0,1)/n");
  CHECK(qn.eval(0.5, 2.0) == doctest::Approx(0.25 / 1.25 + 0.5));
  CHECK(qn.eval(2.0, 2.0) == doctest::Approx(4.0 / 5.0));
}

TEST_CASE("expression grammar: parse errors carry a column") {
  auto expect_parse_error = [](const char* text) {
    try {
      Expression::parse(text);
      FAIL_CHECK("expected ParseError for: " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
  };
  expect_parse_error("1 +");
  expect_parse_error("foo(x)");
  expect_parse_error("sin(x");
  expect_parse_error("min(1)");
  expect_parse_error("indicator(1, 2, 3)");
  expect_parse_error("2 * * 3");
  expect_parse_error("y + 1");
  expect_parse_error("1 2");
}
