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
#include <cstdint>
#include <memory>
#include <vector>

#include <doctest.h>

#include "shapkit/dataset.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/model.hpp"
#include "shapkit/rng.hpp"

using namespace shapkit;

namespace {

model_ptr diabetes_like_linear() {
  return std::make_shared<linear_model>(
      154.15, std::vector<std::pair<std::string, double>>{
                  {"age", 0.0}, {"sex", 0.0}, {"bmi", 399.0}, {"bp", 4.9}, {"s1", 0.0},
                  {"s2", 0.0},  {"s3", 0.0},  {"s4", 0.0},    {"s5", 291.0}, {"s6", 0.0}});
}

feature_vector all_zero(const std::vector<std::string>& names) {
  return feature_vector(names, std::vector<double>(names.size(), 0.0));
}

}  // namespace

TEST_CASE("linear model evaluation and coefficients") {
  const auto f = diabetes_like_linear();
  const feature_vector zeros = all_zero(f->referenced_features());
  CHECK(f->eval(zeros) == 154.15);
  CHECK(f->analytic_partial(zeros, "bmi") == 399.0);
  CHECK(f->analytic_partial(zeros, "age") == 0.0);

  feature_vector x = zeros;
  x.set("bmi", 1.0);
  x.set("s5", 2.0);
  CHECK(f->eval(x) == doctest::Approx(154.15 + 399.0 + 582.0));
}

TEST_CASE("missing feature names the feature") {
  const auto f = diabetes_like_linear();
  feature_vector partial;
  for (const std::string& name : f->referenced_features()) {
    if (name != "bmi") partial.set(name, 1.0);
  }
  CHECK_THROWS_WITH_AS(f->eval(partial), doctest::Contains("bmi"), missing_feature_error);
}

TEST_CASE("tree ensemble split convention sends ties right") {
  // Single split on x1 < 2: left leaf 10, right leaf 20.
  decision_tree tree;
  tree.nodes.resize(3);
  tree.nodes[0].feature = "x1";
  tree.nodes[0].threshold = 2.0;
  tree.nodes[0].left = 1;
  tree.nodes[0].right = 2;
  tree.nodes[1].value = 10.0;
  tree.nodes[2].value = 20.0;
  const tree_ensemble_model f({tree});

  CHECK(f.eval(feature_vector{{"x1", 1.9}}) == 10.0);
  CHECK(f.eval(feature_vector{{"x1", 2.0}}) == 20.0);
  CHECK(f.eval(feature_vector{{"x1", 2.1}}) == 20.0);
}

TEST_CASE("tree ensemble averages weighted trees") {
  decision_tree leaf_only;
  leaf_only.nodes.resize(1);
  leaf_only.nodes[0].value = 4.0;
  decision_tree heavier = leaf_only;
  heavier.nodes[0].value = 10.0;
  heavier.weight = 3.0;
  const tree_ensemble_model f({leaf_only, heavier});
  CHECK(f.eval(feature_vector{}) == doctest::Approx((4.0 + 30.0) / 4.0));
}

TEST_CASE("lookup table hits, defaults, and misses") {
  const lookup_table_model with_default(
      {{feature_vector{{"x", 1.0}, {"y", 2.0}}, 7.0}}, -1.0);
  CHECK(with_default.eval(feature_vector{{"x", 1.0}, {"y", 2.0}}) == 7.0);
  CHECK(with_default.eval(feature_vector{{"x", 0.0}, {"y", 2.0}}) == -1.0);

  const lookup_table_model no_default({{feature_vector{{"x", 1.0}, {"y", 2.0}}, 7.0}});
  CHECK_THROWS_AS(no_default.eval(feature_vector{{"x", 0.0}, {"y", 2.0}}), lookup_error);
}

TEST_CASE("sum model matches the explicit combination") {
  const auto f1 = std::make_shared<expression_model>("x ^ 2");
  const auto f2 = std::make_shared<expression_model>("x + y");
  const sum_model combo({{2.5, f1}, {-1.0, f2}});

  rng_stream rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const feature_vector x{{"x", rng.uniform01() * 10 - 5}, {"y", rng.uniform01() * 10 - 5}};
    const double direct = 2.5 * f1->eval(x) - f2->eval(x);
    const double got = combo.eval(x);
    CHECK(std::abs(got - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("affine reparameterization inverts the coordinate map") {
  const auto f = std::make_shared<expression_model>("x * y + y");
  const double c = 2.0;
  const double d = -3.0;
  const affine_reparam_model g(f, "x", c, d);

  rng_stream rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const double v = rng.uniform01() * 8 - 4;
    const double y = rng.uniform01() * 8 - 4;
    const feature_vector original{{"x", v}, {"y", y}};
    const feature_vector transformed{{"x", c * v + d}, {"y", y}};
    CHECK(g.eval(transformed) == doctest::Approx(f->eval(original)).epsilon(1e-12));
  }
}

TEST_CASE("layered model computes nodes then the outer model") {
  const auto inner = std::make_shared<expression_model>("x1 * x2");
  const auto outer = std::make_shared<expression_model>("h * x3");
  const layered_model f(outer, {{"h", inner}});

  const feature_vector x{{"x1", 2.0}, {"x2", 3.0}, {"x3", 4.0}};
  CHECK(f.eval(x) == 24.0);

  const feature_vector mid = f.intermediate_values(x);
  CHECK(mid.get("h") == 6.0);
  CHECK(mid.get("x3") == 4.0);

  const auto names = f.referenced_features();
  CHECK(std::count(names.begin(), names.end(), "x3") == 1);
  CHECK(std::count(names.begin(), names.end(), "h") == 0);
}

TEST_CASE("dataset agreement selects the explicand row") {
  // Rows (5,5), (1,1), (1,2) under features x, y.
  const dataset data({"x", "y"}, {{5.0, 5.0}, {1.0, 1.0}, {1.0, 2.0}});
  const feature_vector x{{"x", 5.0}, {"y", 5.0}};
  const feature_subset s({"x", "y"}, std::vector<std::string>{"x"});

  const auto rows = data.agreeing_rows(x, s, agreement_tolerance::exact());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == 0);

  const feature_subset none({"x", "y"}, std::uint64_t{0});
  CHECK(data.agreeing_rows(x, none, agreement_tolerance::exact()).size() == 3);
}

TEST_CASE("smoothed agreement admits rows within tau sigma") {
  const dataset data({"x"}, {{0.0}, {10.0}, {20.0}, {30.0}});
  const double sigma = data.feature_std("x");
  CHECK(sigma == doctest::Approx(std::sqrt(125.0)));

  const feature_vector x{{"x", 10.0}};
  const feature_subset s({"x"}, std::vector<std::string>{"x"});
  // tau sigma just above 10 captures the two neighbors as well.
  const auto near = data.agreeing_rows(x, s, agreement_tolerance::within_sigma(1.0));
  CHECK(near.size() == 3);
  const auto exact = data.agreeing_rows(x, s, agreement_tolerance::exact());
  CHECK(exact.size() == 1);
}

TEST_CASE("agreement is downward closed") {
  rng_stream rng(7);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({std::floor(rng.uniform01() * 3), std::floor(rng.uniform01() * 3),
                    std::floor(rng.uniform01() * 3)});
  }
  const dataset data({"a", "b", "c"}, rows);
  const feature_vector x{{"a", 1.0}, {"b", 2.0}, {"c", 0.0}};
  const std::vector<std::string> universe{"a", "b", "c"};

  for (std::uint64_t small = 0; small < 8; ++small) {
    for (std::uint64_t big = 0; big < 8; ++big) {
      if ((small & big) != small) continue;
      const auto larger =
          data.agreeing_rows(x, feature_subset(universe, big), agreement_tolerance::exact());
      const auto smaller =
          data.agreeing_rows(x, feature_subset(universe, small), agreement_tolerance::exact());
      for (std::size_t row : larger)
        CHECK(std::find(smaller.begin(), smaller.end(), row) != smaller.end());
    }
  }
}

TEST_CASE("weighted rows carry through restriction") {
  const dataset data({"x"}, {{1.0}, {1.0}, {2.0}}, std::vector<double>{1.0, 3.0, 2.0});
  CHECK(data.has_weights());
  CHECK(data.total_weight() == 6.0);

  const feature_vector x{{"x", 1.0}};
  const feature_subset s({"x"}, std::vector<std::string>{"x"});
  const dataset kept = data.restrict_agreement(x, s, agreement_tolerance::exact());
  REQUIRE(kept.row_count() == 2);
  CHECK(kept.weight(0) == 1.0);
  CHECK(kept.weight(1) == 3.0);
}
