// Copyright 2026 The pnmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "pnm/evolutions.hpp"
#include "pnm/expr.hpp"

using Catch::Approx;
using namespace pnm;

namespace {
double at(std::string_view text, double t) { return eval_expr(ScalarFn::parse(text), t); }
}  // namespace

TEST_CASE("evaluation") {
  CHECK(at("t", 3) == 3);
  CHECK(at("1-2*t", 0.25) == Approx(0.5));
  CHECK(at(kPaperExampleF, 0.0) == Approx(1.0));
  CHECK(at(kPaperExampleF, 0.275) == Approx(0.334).margin(0.002));
  CHECK(at(kAppendixF, 0.5) == 0.0);
  CHECK(at(kAppendixF, 1.5) == Approx(0.64).margin(1e-12));
  CHECK(at("exp(log(2))", 0) == Approx(2));
  CHECK(at("sqrt(abs(-9))+cosh(0)+sinh(0)+tanh(0)+cos(0)+sin(0)", 0) == Approx(5));
  CHECK(at("2.5e-1*4", 0) == Approx(1));
  CHECK(at(".5+t", 1) == Approx(1.5));
}

TEST_CASE("precedence and associativity") {
  CHECK(at("2+3*4", 0) == 14);
  CHECK(at("2^3^2", 0) == 512);
  CHECK(at("-2^2", 0) == -4);
  CHECK(at("(-2)^2", 0) == 4);
  CHECK(at("8/4/2", 0) == 1);
  CHECK(at("8-4-2", 0) == 2);
  CHECK(at("2*-t", 3) == -6);
  CHECK(at("--t", 3) == 3);
  CHECK(at("2^-1", 0) == 0.5);
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse_expr(""), SyntaxError);
  CHECK_THROWS_AS(parse_expr("1+"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("x+1"), SyntaxError);
  CHECK_THROWS_AS(parse_expr("foo(t)"), UnknownFunction);
  CHECK_THROWS_AS(parse_expr("(1+t"), UnbalancedParens);
  CHECK_THROWS_AS(parse_expr("1+t)"), UnbalancedParens);
  CHECK_THROWS_AS(parse_expr("t\xC3\xA9"), SyntaxError);
  try {
    parse_expr("1 + * 2");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_expr("2*bogus(t)");
    FAIL("expected an unknown function");
  } catch (const UnknownFunction& e) {
    CHECK(e.offset() == 2);
  }
}

TEST_CASE("non-finite values") {
  const auto f = ScalarFn::parse("1/t");
  CHECK(std::isinf(f(0.0)));
  CHECK_THROWS_AS(eval_expr(f, 0.0), NonFiniteResult);
  CHECK_THROWS_AS(eval_expr(ScalarFn::parse("(-2)^0.5"), 0), NonFiniteResult);
}

TEST_CASE("structural equality and printing") {
  const auto a = parse_expr(kPaperExampleF);
  const auto b = parse_expr(kPaperExampleF);
  CHECK(a == b);
  CHECK_FALSE(a == parse_expr("t"));
  for (const char* text : {kPaperExampleF, kAppendixF, "-sin(1/t)*tanh(t)", "2^3^2", "-2^2"}) {
    const auto ast = parse_expr(text);
    const auto again = parse_expr(to_string(ast));
    for (double t : {0.1, 0.7, 2.3}) {
      CHECK(ScalarFn(again)(t) == ScalarFn(ast)(t));
    }
  }
}

TEST_CASE("substitution, shifting and scaling") {
  const auto f = ScalarFn::parse("t^2+1");
  CHECK(f.shifted(2.0)(1.0) == Approx(10.0));
  CHECK(f.scaled(0.5)(1.0) == Approx(1.0));
  const auto g = ScalarFn::parse(kPaperExampleF);
  const double T = 0.275;
  const auto core = g.shifted(T).scaled(1.0 / g(T));
  CHECK(core(0.0) == Approx(1.0));
  CHECK(core(0.3) == Approx(g(0.3 + T) / g(T)));
}

TEST_CASE("numeric derivative") {
  CHECK(numeric_derivative(ScalarFn::parse("t^2"), 1.0) == Approx(2.0).margin(1e-6));
  CHECK(numeric_derivative(ScalarFn::parse("exp(-t)"), 0.0) == Approx(-1.0).margin(1e-6));
  // The stationary point sits at 0.4945619149...; the rounded 0.495 is
  // 4.4e-4 past it where f'' = 5.40, so f'(0.495) = 2.3635e-3 (symbolic value).
  CHECK(numeric_derivative(ScalarFn::parse(kPaperExampleF), 0.494561914972390) == Approx(0.0).margin(1e-6));
  CHECK(numeric_derivative(ScalarFn::parse(kPaperExampleF), 0.495) == Approx(0.00236353426498).margin(1e-6));
  // Polynomials against their exact derivatives.
  const auto p = ScalarFn::parse("3*t^4-2*t^3+t-7");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 200; ++k) {
    const double t = u(rng);
    const double exact = 12 * t * t * t - 6 * t * t + 1;
    CHECK(numeric_derivative(p, t) == Approx(exact).epsilon(1e-5).margin(1e-5));
  }
}
