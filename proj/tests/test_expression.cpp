/*
 * Copyright 2026 The shapkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <memory>

#include <doctest.h>

#include "shapkit/errors.hpp"
#include "shapkit/expression.hpp"
#include "shapkit/model.hpp"

using namespace shapkit;

namespace {

double eval_source(const std::string& source, const feature_vector& x) {
  return expression_model(source).eval(x);
}

}  // namespace

TEST_CASE("expression arithmetic and precedence") {
  const feature_vector x{{"x1", 5.0}, {"x2", 1.0}};
  CHECK(eval_source("min(x1, x2)", x) == 1.0);
  CHECK(eval_source("max(x1, x2)", x) == 5.0);
  CHECK(eval_source("(x1 + x2) ^ 3", x) == 216.0);
  CHECK(eval_source("2 + 3 * 4 ^ 2", x) == 50.0);
  CHECK(eval_source("-x1 + 2", x) == -3.0);
  CHECK(eval_source("x1 - x2 - 1", x) == 3.0);
  CHECK(eval_source("x1 / x2 / 5", x) == 1.0);
  CHECK(eval_source("sqrt(x1 - 1)", x) == 2.0);
  CHECK(eval_source("pow(x2 + 1, 3)", x) == 8.0);
}

TEST_CASE("expression comparisons and boolean operators") {
  const feature_vector a{{"x1", 0.0}, {"x2", 1.0}};
  const feature_vector b{{"x1", 1.0}, {"x2", 1.0}};
  CHECK(eval_source("x1 == 0 && x2 == 1", a) == 1.0);
  CHECK(eval_source("!(x1 == 0 && x2 == 1)", a) == 0.0);
  CHECK(eval_source("!(x1 == 0 && x2 == 1)", b) == 1.0);
  CHECK(eval_source("x1 == x2", b) == 1.0);
  CHECK(eval_source("x1 != x2", a) == 1.0);
  CHECK(eval_source("x1 <= 0 || x2 < 0", a) == 1.0);
  CHECK(eval_source("x1 > 0 || x2 >= 2", a) == 0.0);
}

TEST_CASE("expression evaluation errors") {
  const feature_vector x{{"x1", 1.0}, {"x2", 0.0}};
  CHECK_THROWS_AS(eval_source("x1 / x2", x), domain_error);
  CHECK_THROWS_AS(eval_source("sqrt(0 - x1)", x), domain_error);
  CHECK_THROWS_AS(eval_source("x1 + x3", x), missing_feature_error);
}

TEST_CASE("expression parse errors") {
  CHECK_THROWS_AS(parse_expression("x1 +"), parse_error);
  CHECK_THROWS_AS(parse_expression("foo(x1)"), parse_error);
  CHECK_THROWS_AS(parse_expression("(x1"), parse_error);
  CHECK_THROWS_AS(parse_expression(""), parse_error);
  CHECK_THROWS_AS(parse_expression("x1 x2"), parse_error);
}

TEST_CASE("analytic partial derivatives") {
  const feature_vector x{{"x1", 5.0}, {"x2", 1.0}};
  const expression_model cube("(x1 + x2) ^ 3");
  CHECK(cube.has_analytic_gradient());
  CHECK(cube.analytic_partial(x, "x1") == 108.0);
  CHECK(cube.analytic_partial(x, "x2") == 108.0);

  const expression_model prod("x1 * x2 ^ 2 + x1");
  CHECK(prod.analytic_partial(x, "x1") == 2.0);
  CHECK(prod.analytic_partial(x, "x2") == 10.0);

  const expression_model root("sqrt(x1)");
  CHECK(root.analytic_partial(feature_vector{{"x1", 4.0}}, "x1") == doctest::Approx(0.25));
}

TEST_CASE("central difference derivative near a kink") {
  const expression_model f("min(x1, x2)");
  const feature_vector x{{"x1", 5.0}, {"x2", 1.0}};
  const double d2 = partial_derivative(f, x, "x2", derivative_mode::central_difference, 1e-6);
  CHECK(std::abs(d2 - 1.0) <= 1e-6);
  const double d1 = partial_derivative(f, x, "x1", derivative_mode::central_difference, 1e-6);
  CHECK(std::abs(d1) <= 1e-6);
}

TEST_CASE("analytic derivatives refused where unsupported") {
  const lookup_table_model table({{feature_vector{{"x1", 0.0}}, 1.0}}, 0.0);
  CHECK_FALSE(table.has_analytic_gradient());
  const feature_vector x{{"x1", 0.0}};
  CHECK_THROWS_AS(partial_derivative(table, x, "x1", derivative_mode::analytic),
                  capability_error);
}

TEST_CASE("declared feature list fixes the universe") {
  const expression_model f("x1 + x2", std::vector<std::string>{"x1", "x2", "x3"});
  const auto names = f.referenced_features();
  REQUIRE(names.size() == 3);
  CHECK(names[2] == "x3");
  CHECK(f.eval(feature_vector{{"x1", 1.0}, {"x2", 2.0}, {"x3", 9.0}}) == 3.0);
}
