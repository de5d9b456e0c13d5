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
#include <cstdint>
#include <memory>
#include <vector>

#include <doctest.h>

#include "shapkit/dataset.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/methods.hpp"
#include "shapkit/model.hpp"
#include "shapkit/oracle.hpp"
#include "shapkit/rng.hpp"

using namespace shapkit;

namespace {

model_ptr expr(const std::string& source) { return std::make_shared<expression_model>(source); }

const feature_vector kCubeX{{"x1", 5.0}, {"x2", 1.0}};
const feature_vector kCubeZero{{"x1", 0.0}, {"x2", 0.0}};

}  // namespace

TEST_CASE("mixed vector game on the cube") {
  const auto f = expr("(x1 + x2) ^ 3");
  const attribution a = bshap(f, kCubeX, kCubeZero);
  CHECK(std::abs(a.score("x1") - 170.0) <= 1e-9);
  CHECK(std::abs(a.score("x2") - 46.0) <= 1e-9);

  const attribution at_baseline = bshap(f, kCubeZero, kCubeZero);
  CHECK(at_baseline.score("x1") == 0.0);
  CHECK(at_baseline.score("x2") == 0.0);

  CHECK_THROWS_AS(bshap(f, kCubeX, feature_vector{{"x1", 0.0}}), argument_error);
}

TEST_CASE("unreferenced features earn exactly zero from the mixed game") {
  const auto f = std::make_shared<linear_model>(
      1.0, std::vector<std::pair<std::string, double>>{{"a", 2.0}, {"b", 0.0}, {"c", -1.0}});
  const feature_vector x{{"a", 3.0}, {"b", 9.0}, {"c", 2.0}};
  const feature_vector zero{{"a", 0.0}, {"b", 0.0}, {"c", 0.0}};
  const attribution a = bshap(f, x, zero);
  CHECK(a.score("b") == 0.0);
  CHECK(a.score("a") == doctest::Approx(6.0));
  CHECK(a.score("c") == doctest::Approx(-2.0));
}

TEST_CASE("random baseline method averages the mixed game over atoms") {
  const auto f = expr("x1 * x2");
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}};
  const auto coupled = discrete_distribution::from_atoms(
      {{feature_vector{{"x1", 0.0}, {"x2", 0.0}}, 0.5},
       {feature_vector{{"x1", 1.0}, {"x2", 1.0}}, 0.5}});

  const attribution joint = rbshap(f, x, coupled);
  CHECK(joint.sum() == doctest::Approx(0.5).epsilon(1e-12));

  const attribution product = rbshap(f, x, discrete_distribution::product_of_marginals(coupled));
  CHECK(product.sum() == doctest::Approx(0.75).epsilon(1e-12));

  // A point mass collapses the average to one baseline.
  const feature_vector b{{"x1", 0.5}, {"x2", -1.0}};
  const auto point = discrete_distribution::from_atoms({{b, 1.0}});
  const attribution averaged = rbshap(f, x, point);
  const attribution direct = bshap(f, x, b);
  CHECK(std::abs(averaged.score("x1") - direct.score("x1")) <= 1e-12);
  CHECK(std::abs(averaged.score("x2") - direct.score("x2")) <= 1e-12);
}

TEST_CASE("conditional method on the skewed pair approaches the even split") {
  const double eps = 1e-6;
  const auto d = discrete_distribution::from_atoms(
      {{feature_vector{{"x", 5.0}, {"y", 5.0}}, eps},
       {feature_vector{{"x", 1.0}, {"y", 1.0}}, (1.0 - eps) / 2.0},
       {feature_vector{{"x", 1.0}, {"y", 2.0}}, (1.0 - eps) / 2.0}});
  const auto f1 = expr("y ^ 2");
  const feature_vector x{{"x", 5.0}, {"y", 5.0}};
  const attribution a = ces(f1, x, d);
  CHECK(std::abs(a.score("x") - 11.25) <= 1e-3);
  CHECK(std::abs(a.score("y") - 11.25) <= 1e-3);
}

TEST_CASE("conditional scores follow the explicand rarity") {
  const double p = 0.3;
  const double q = 0.6;
  const auto d = discrete_distribution::independent(
      {{"x", {{1.0, 1.0 - p}, {2.0, p}}}, {"y", {{1.0, 1.0 - q}, {2.0, q}}}});
  const auto f = expr("x + y");
  const attribution a = ces(f, feature_vector{{"x", 2.0}, {"y", 2.0}}, d);
  CHECK(std::abs(a.score("x") - (1.0 - p)) <= 1e-12);
  CHECK(std::abs(a.score("y") - (1.0 - q)) <= 1e-12);
}

TEST_CASE("conditional score of the flat direction vanishes at the mean") {
  std::vector<std::pair<feature_vector, double>> atoms;
  for (double xv : {1.0, 2.0, 3.0})
    for (double yv : {1.0, 2.0}) atoms.push_back({feature_vector{{"x", xv}, {"y", yv}}, 1.0 / 6});
  const auto d = discrete_distribution::from_atoms(std::move(atoms));
  const feature_vector x{{"x", 2.0}, {"y", 2.0}};

  const attribution concave = ces(expr("sqrt(x) + y"), x, d);
  const double expected = (2.0 * std::sqrt(2.0) - 1.0 - std::sqrt(3.0)) / 3.0;
  CHECK(std::abs(concave.score("x") - expected) <= 1e-9);

  const attribution steeper = ces(expr("x + y"), x, d);
  CHECK(std::abs(steeper.score("x")) <= 1e-12);
}

TEST_CASE("row averaged conditional scores on the demand table") {
  const dataset data({"x", "y"}, {{1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}});
  const auto f = expr("100 * x + y");

  const attribution low = ces_empirical(f, feature_vector{{"x", 1.0}, {"y", 0.0}}, data, 0.0);
  CHECK(std::abs(low.score("y") - 193.0 / 12.0) <= 1e-9);
  const attribution high = ces_empirical(f, feature_vector{{"x", 1.0}, {"y", 1.0}}, data, 0.0);
  CHECK(std::abs(high.score("y") + 95.0 / 12.0) <= 1e-9);
  CHECK(low.score("y") > 0.0);
  CHECK(high.score("y") < 0.0);

  // Independent oracle over the same rows.
  const auto low_oracle = oracle::empirical_conditional_shapley(
      *f, feature_vector{{"x", 1.0}, {"y", 0.0}}, data, 0.0);
  CHECK(std::abs(low.score("y") - low_oracle[1]) <= 1e-9);
}

TEST_CASE("fully novel explicands split the change evenly") {
  const dataset data({"x", "y"}, {{1.0, 10.0}, {2.0, 20.0}, {3.0, 30.0}});
  const auto f = expr("100 * x + y");
  const feature_vector x{{"x", 4.5}, {"y", 7.0}};
  const attribution a = ces_empirical(f, x, data, 0.0);

  // The explicand is appended as a row of its own, so the empty coalition
  // averages over four rows.
  const double mean_f = (110.0 + 220.0 + 330.0 + 457.0) / 4.0;
  const double change = f->eval(x) - mean_f;
  CHECK(std::abs(a.score("x") - change / 2) <= 1e-9);
  CHECK(std::abs(a.score("y") - change / 2) <= 1e-9);
}

TEST_CASE("row averaged method matches the distribution view at tau zero") {
  const dataset data({"x", "y"}, {{1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
  const auto f = expr("x * y + 2 * x");
  const feature_vector x{{"x", 1.0}, {"y", 0.0}};

  const attribution rows = ces_empirical(f, x, data, 0.0);
  const attribution dist = ces(f, x, discrete_distribution::empirical(data));
  CHECK(std::abs(rows.score("x") - dist.score("x")) <= 1e-9);
  CHECK(std::abs(rows.score("y") - dist.score("y")) <= 1e-9);
}

TEST_CASE("smoothing widens the agreement and moves scores") {
  const dataset data({"x", "y"}, {{1.0, 1.0}, {1.05, 2.0}, {3.0, 4.0}, {5.0, 0.0}});
  const auto f = expr("x + y");
  const feature_vector x{{"x", 1.0}, {"y", 1.0}};

  const attribution sharp = ces_empirical(f, x, data, 0.0);
  const attribution smooth = ces_empirical(f, x, data, 0.2);
  const double shift =
      std::max(std::abs(sharp.score("x") - smooth.score("x")),
               std::abs(sharp.score("y") - smooth.score("y")));
  CHECK(shift > 1e-6);
}

TEST_CASE("path integral on the kinked and smooth remarks") {
  const attribution min_scores = ig(expr("min(x1, x2)"), kCubeX, kCubeZero);
  CHECK(std::abs(min_scores.score("x1") - 0.0) <= 1e-9);
  CHECK(std::abs(min_scores.score("x2") - 1.0) <= 1e-9);

  const attribution cube_scores = ig(expr("(x1 + x2) ^ 3"), kCubeX, kCubeZero);
  CHECK(std::abs(cube_scores.score("x1") - 180.0) <= 1e-3);
  CHECK(std::abs(cube_scores.score("x2") - 36.0) <= 1e-3);

  const auto linear = std::make_shared<linear_model>(
      5.0, std::vector<std::pair<std::string, double>>{{"x1", 3.0}, {"x2", -2.0}});
  const attribution lin = ig(linear, kCubeX, kCubeZero);
  CHECK(lin.score("x1") == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(lin.score("x2") == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("path integral needs a differentiable surface") {
  decision_tree tree;
  tree.nodes.resize(3);
  tree.nodes[0] = {"x1", 1.0, 1, 2, 0.0};
  tree.nodes[1].value = 0.0;
  tree.nodes[2].value = 1.0;
  const auto f = std::make_shared<tree_ensemble_model>(std::vector<decision_tree>{tree});
  ig_options analytic;
  CHECK_THROWS_AS(ig(f, feature_vector{{"x1", 2.0}}, feature_vector{{"x1", 0.0}}, analytic),
                  capability_error);
}

TEST_CASE("micro subdivision reduces to the plain game at m equal one") {
  const auto f = expr("x1 * x2 ^ 2 + x1");
  const feature_vector x{{"x1", 2.0}, {"x2", 3.0}};
  const feature_vector b{{"x1", 1.0}, {"x2", 1.0}};
  const attribution micro1 = micro_shapley(f, x, b, 1);
  const attribution base = bshap(f, x, b);
  CHECK(std::abs(micro1.score("x1") - base.score("x1")) <= 1e-12);
  CHECK(std::abs(micro1.score("x2") - base.score("x2")) <= 1e-12);
}

TEST_CASE("micro subdivision approaches the path integral") {
  const auto f = expr("(x1 + x2) ^ 3");
  const attribution grad = ig(f, kCubeX, kCubeZero);
  const attribution micro64 = micro_shapley(f, kCubeX, kCubeZero, 64);
  const double gap = std::max(std::abs(micro64.score("x1") - grad.score("x1")),
                              std::abs(micro64.score("x2") - grad.score("x2")));
  CHECK(gap < 0.01 * 180.0);
}

TEST_CASE("every method is linear preserving on linear models") {
  const auto f = std::make_shared<linear_model>(
      2.0, std::vector<std::pair<std::string, double>>{{"x1", 4.0}, {"x2", -1.5}});
  const feature_vector x{{"x1", 3.0}, {"x2", 2.0}};
  const feature_vector b{{"x1", 1.0}, {"x2", 1.0}};
  const attribution base = bshap(f, x, b);
  const attribution grad = ig(f, x, b);
  const attribution micro5 = micro_shapley(f, x, b, 5);
  for (const auto& name : {"x1", "x2"}) {
    CHECK(std::abs(base.score(name) - grad.score(name)) <= 1e-12);
    CHECK(std::abs(base.score(name) - micro5.score(name)) <= 1e-12);
  }
}

TEST_CASE("linear model with independent law ties means baseline to conditioning") {
  const auto f = std::make_shared<linear_model>(
      1.0, std::vector<std::pair<std::string, double>>{{"x", 2.0}, {"y", -3.0}});
  const auto d = discrete_distribution::independent(
      {{"x", {{0.0, 0.25}, {4.0, 0.75}}}, {"y", {{1.0, 0.5}, {3.0, 0.5}}}});
  const feature_vector x{{"x", 4.0}, {"y", 1.0}};
  const feature_vector means{{"x", 3.0}, {"y", 2.0}};

  const attribution conditioned = ces(f, x, d);
  const attribution mixed = bshap(f, x, means);
  CHECK(std::abs(conditioned.score("x") - mixed.score("x")) <= 1e-9);
  CHECK(std::abs(conditioned.score("y") - mixed.score("y")) <= 1e-9);
}

TEST_CASE("cost sharing reduction leaves monotone problems alone") {
  const auto f = expr("x * y + x");
  const feature_vector x{{"x", 2.0}, {"y", 3.0}};
  const feature_vector zero{{"x", 0.0}, {"y", 0.0}};
  const cost_sharing_reduction red = reduce_to_cost_sharing(f, x, zero);
  CHECK(red.p >= 0.0);
  // f2 is identically zero when no partial dips below zero.
  CHECK(eval_model(*red.f2, red.explicand) == 0.0);
  CHECK(eval_model(*red.f1, red.explicand) ==
        doctest::Approx(eval_model(*f, x)).epsilon(1e-12));
}

TEST_CASE("cost sharing reduction arithmetic on a signed linear model") {
  const auto f = std::make_shared<linear_model>(
      0.0, std::vector<std::pair<std::string, double>>{{"x1", -1.0}, {"x2", 1.0}});
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}};
  const feature_vector zero{{"x1", 0.0}, {"x2", 0.0}};
  const cost_sharing_reduction red = reduce_to_cost_sharing(f, x, zero);

  CHECK(red.p == doctest::Approx(-1.0));
  // f2 = sum of (-p) x_i; f1 = reparameterized f plus f2 = 2 x2 here.
  CHECK(eval_model(*red.f2, feature_vector{{"x1", 1.0}, {"x2", 1.0}}) == doctest::Approx(2.0));
  CHECK(eval_model(*red.f1, feature_vector{{"x1", 1.0}, {"x2", 1.0}}) == doctest::Approx(2.0));
  CHECK(eval_model(*red.f1, feature_vector{{"x1", 1.0}, {"x2", 0.0}}) == doctest::Approx(0.0));

  const feature_vector lo{{"x1", 0.0}, {"x2", 0.0}};
  const feature_vector hi{{"x1", 1.0}, {"x2", 1.0}};
  CHECK(grid_nondecreasing(*red.f1, lo, hi));
  CHECK(grid_nondecreasing(*red.f2, lo, hi));
}

TEST_CASE("attribution differences survive the reduction round trip") {
  rng_stream rng(301);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = expr("x * y + 2 * x - 3 * y + z ^ 2 - 2 * z");
    const feature_vector x{{"x", 2.0 + rng.uniform01()}, {"y", 1.0}, {"z", 3.0}};
    const feature_vector b{{"x", -1.0}, {"y", 2.0}, {"z", rng.uniform01()}};
    const cost_sharing_reduction red = reduce_to_cost_sharing(f, x, b);

    const attribution whole = bshap(f, x, b);
    const attribution pos = bshap(red.f1, red.explicand, red.baseline);
    const attribution neg = bshap(red.f2, red.explicand, red.baseline);
    for (std::size_t i = 0; i < whole.features.size(); ++i) {
      const double recomposed =
          pos.score(whole.features[i]) - neg.score(whole.features[i]);
      CHECK(std::abs(whole.scores[i] - recomposed) <= 1e-9);
    }

    const attribution whole_ig = ig(f, x, b);
    const attribution pos_ig = ig(red.f1, red.explicand, red.baseline);
    const attribution neg_ig = ig(red.f2, red.explicand, red.baseline);
    for (std::size_t i = 0; i < whole_ig.features.size(); ++i) {
      const double recomposed =
          pos_ig.score(whole_ig.features[i]) - neg_ig.score(whole_ig.features[i]);
      CHECK(std::abs(whole_ig.scores[i] - recomposed) <= 1e-9);
    }
  }
}

TEST_CASE("layer wise attribution matches the worked three variable cases") {
  const feature_vector ones{{"x1", 1.0}, {"x2", 1.0}, {"x3", 1.0}};
  const feature_vector zeros{{"x1", 0.0}, {"x2", 0.0}, {"x3", 0.0}};

  const auto left = std::make_shared<layered_model>(
      expr("h * x3"), std::vector<std::pair<std::string, model_ptr>>{{"h", expr("x1 * x2")}});
  const attribution la = compositional_bshap(left, ones, zeros);
  CHECK(la.score("x1") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(la.score("x2") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(la.score("x3") == doctest::Approx(0.5).epsilon(1e-12));

  const auto right = std::make_shared<layered_model>(
      expr("x1 * h"), std::vector<std::pair<std::string, model_ptr>>{{"h", expr("x2 * x3")}});
  const attribution ra = compositional_bshap(right, ones, zeros);
  CHECK(ra.score("x1") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ra.score("x2") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ra.score("x3") == doctest::Approx(0.25).epsilon(1e-12));

  // End to end, the product ignores the layer structure entirely.
  const attribution flat = bshap(expr("x1 * x2 * x3"), ones, zeros);
  for (const auto& name : {"x1", "x2", "x3"})
    CHECK(flat.score(name) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // A passthrough layer changes nothing.
  const auto pass = std::make_shared<layered_model>(
      expr("h"), std::vector<std::pair<std::string, model_ptr>>{{"h", expr("x1 * x2")}});
  const feature_vector two{{"x1", 2.0}, {"x2", 3.0}};
  const feature_vector zero2{{"x1", 0.0}, {"x2", 0.0}};
  const attribution pa = compositional_bshap(pass, two, zero2);
  const attribution ba = bshap(expr("x1 * x2"), two, zero2);
  CHECK(pa.score("x1") == doctest::Approx(ba.score("x1")).epsilon(1e-12));
  CHECK(pa.score("x2") == doctest::Approx(ba.score("x2")).epsilon(1e-12));

  CHECK_THROWS_AS(compositional_bshap(expr("x1 * x2"), two, zero2), argument_error);
}

TEST_CASE("request driver validates and dispatches") {
  attribution_request request;
  request.f = expr("x1 + x2");
  request.explicand = kCubeX;
  request.method = "bshap";
  CHECK_THROWS_AS(run_attribution(request), argument_error);

  request.baseline = kCubeZero;
  const attribution a = run_attribution(request);
  CHECK(a.method == "bshap");
  CHECK(a.sum() == doctest::Approx(6.0));

  request.method = "unknown";
  CHECK_THROWS_AS(run_attribution(request), argument_error);

  request.method = "ces";
  CHECK_THROWS_AS(run_attribution(request), argument_error);
}
