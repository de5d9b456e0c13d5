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

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <doctest.h>

#include "shapkit/axioms.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/model.hpp"
#include "shapkit/scenarios.hpp"

using namespace shapkit;

namespace {

model_ptr expr(const std::string& source,
               std::optional<std::vector<std::string>> features = std::nullopt) {
  return std::make_shared<expression_model>(source, std::move(features));
}

method_context bshap_context(const feature_vector& baseline) {
  method_context ctx;
  ctx.method = "bshap";
  ctx.baseline = baseline;
  return ctx;
}

}  // namespace

TEST_CASE("axiom names round trip") {
  for (const axiom_id id : all_axioms()) CHECK(axiom_from_name(axiom_name(id)) == id);
  CHECK_THROWS_AS(axiom_from_name("unheard-of"), lookup_error);
}

TEST_CASE("dummy holds for the mixed vector game and is verified first") {
  axiom_check check;
  check.axiom = axiom_id::dummy;
  check.method = bshap_context(feature_vector{{"x", 0.0}, {"y", 0.0}});
  check.f = expr("y ^ 2", std::vector<std::string>{"x", "y"});
  check.explicand = feature_vector{{"x", 5.0}, {"y", 5.0}};
  check.feature = "x";
  check.grid = {{"x", {0.0, 5.0}}, {"y", {0.0, 5.0}}};

  const axiom_report report = check_axiom(check);
  CHECK(report.antecedent_holds);
  CHECK(report.pass);
  CHECK(report.deviation == 0.0);
}

TEST_CASE("dummy fails for conditioning on the skewed pair") {
  const axiom_check check = make_axiom_instance("table1", axiom_id::dummy, "ces_empirical");
  const axiom_report report = check_axiom(check);
  CHECK(report.antecedent_holds);
  CHECK_FALSE(report.pass);
  CHECK(report.deviation == doctest::Approx(11.25).epsilon(1e-3));
  CHECK(report.witness.find("x") != std::string::npos);
}

TEST_CASE("a verifiably false antecedent is an instance error") {
  axiom_check check;
  check.axiom = axiom_id::dummy;
  check.method = bshap_context(feature_vector{{"x", 0.0}, {"y", 0.0}});
  check.f = expr("x + y");
  check.explicand = feature_vector{{"x", 5.0}, {"y", 5.0}};
  check.feature = "x";
  check.grid = {{"x", {0.0, 5.0}}, {"y", {0.0, 5.0}}};
  CHECK_THROWS_AS(check_axiom(check), instance_error);
}

TEST_CASE("linearity of the mixed vector game") {
  axiom_check check;
  check.axiom = axiom_id::linearity;
  check.method = bshap_context(feature_vector{{"x", 0.0}, {"y", 0.0}});
  check.f = expr("x * y");
  check.f2 = expr("x ^ 2 - y");
  check.combo_a = 2.0;
  check.combo_b = -0.5;
  check.explicand = feature_vector{{"x", 3.0}, {"y", 2.0}};
  CHECK(check_axiom(check).pass);
}

TEST_CASE("linearity fails for conditioning on the skewed pair") {
  const axiom_check check = make_axiom_instance("table1", axiom_id::linearity, "ces_empirical");
  const axiom_report report = check_axiom(check);
  CHECK_FALSE(report.pass);
}

TEST_CASE("symmetry verified and checked") {
  axiom_check check;
  check.axiom = axiom_id::symmetry;
  check.method = bshap_context(feature_vector{{"x", 0.0}, {"y", 0.0}, {"z", 0.0}});
  check.f = expr("(x + y) ^ 2 + z * x + z * y");
  check.explicand = feature_vector{{"x", 2.0}, {"y", 2.0}, {"z", 1.0}};
  check.feature = "x";
  check.feature2 = "y";
  check.grid = {{"x", {0.0, 2.0}}, {"y", {0.0, 2.0}}, {"z", {0.0, 1.0}}};
  CHECK(check_axiom(check).pass);

  const axiom_check table4 = make_axiom_instance("table4", axiom_id::symmetry, "ces");
  const axiom_report report = check_axiom(table4);
  CHECK(report.antecedent_holds);
  CHECK_FALSE(report.pass);
  CHECK(report.deviation == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("affine scale invariance of the mixed vector game") {
  axiom_check check;
  check.axiom = axiom_id::asi;
  check.method = bshap_context(feature_vector{{"x", 1.0}, {"y", -1.0}});
  check.f = expr("x * y + x ^ 2");
  check.explicand = feature_vector{{"x", 3.0}, {"y", 2.0}};
  check.feature = "x";
  check.asi_scale = 2.0;
  check.asi_shift = 1.0;
  CHECK(check_axiom(check).pass);
}

TEST_CASE("demand monotonicity passes for the mixed game and fails for conditioning") {
  axiom_check check;
  check.axiom = axiom_id::demand_monotonicity;
  check.method = bshap_context(feature_vector{{"x", 0.0}, {"y", 0.0}});
  check.f = expr("x * y + 2 * x");
  check.explicand = feature_vector{{"x", 1.0}, {"y", 1.0}};
  check.raised_explicand = feature_vector{{"x", 2.0}, {"y", 1.0}};
  check.feature = "x";
  check.grid = {{"x", {0.0, 1.0, 2.0}}, {"y", {0.0, 1.0}}};
  CHECK(check_axiom(check).pass);

  const axiom_check table3 =
      make_axiom_instance("table3", axiom_id::demand_monotonicity, "ces_empirical");
  const axiom_report report = check_axiom(table3);
  CHECK(report.antecedent_holds);
  CHECK_FALSE(report.pass);
}

TEST_CASE("proportionality for the path integral on sum dependent models") {
  axiom_check check;
  check.axiom = axiom_id::proportionality;
  check.method.method = "ig";
  check.method.baseline = feature_vector{{"x", 0.0}, {"y", 0.0}};
  check.f = expr("(x + y) ^ 2 + 3 * (x + y)");
  check.explicand = feature_vector{{"x", 3.0}, {"y", 1.0}};
  check.antecedent_asserted = true;
  check.tolerance = 1e-6;
  CHECK(check_axiom(check).pass);
}

TEST_CASE("proportionality antecedent must be asserted or verifiable") {
  axiom_check check;
  check.axiom = axiom_id::proportionality;
  check.method.method = "ig";
  check.method.baseline = feature_vector{{"x", 0.0}, {"y", 0.0}};
  check.f = expr("(x + y) ^ 2");
  check.explicand = feature_vector{{"x", 3.0}, {"y", 1.0}};
  // Continuous instance, no grid, no assertion: refuse to run vacuously.
  CHECK_THROWS_AS(check_axiom(check), instance_error);
}

TEST_CASE("strong monotonicity fails for conditioning on the grid pair") {
  const axiom_check check =
      make_axiom_instance("table5", axiom_id::strong_monotonicity, "ces");
  const axiom_report report = check_axiom(check);
  CHECK(report.antecedent_holds);
  CHECK_FALSE(report.pass);
}

TEST_CASE("efficiency across methods on one instance") {
  for (const char* method : {"bshap", "ces_empirical", "ig", "pms"}) {
    const axiom_check check = make_axiom_instance("table1", axiom_id::efficiency, method);
    const axiom_report report = check_axiom(check);
    CHECK(report.pass);
  }
}

TEST_CASE("instance registry rejects unknown names") {
  CHECK_THROWS_AS(make_axiom_instance("no-such-instance", axiom_id::dummy, "bshap"),
                  lookup_error);
  const auto& names = axiom_instance_names();
  CHECK(std::find(names.begin(), names.end(), "table1") != names.end());
  CHECK(std::find(names.begin(), names.end(), "diabetes") != names.end());
}

TEST_CASE("diabetes instance dummy check for the mixed game") {
  const axiom_check check = make_axiom_instance("diabetes", axiom_id::dummy, "bshap");
  const axiom_report report = check_axiom(check);
  CHECK(report.antecedent_holds);
  CHECK(report.pass);
  CHECK(report.deviation == 0.0);
}
