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
#include <map>
#include <memory>
#include <vector>

#include <doctest.h>

#include "shapkit/dataset.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/model.hpp"
#include "shapkit/rng.hpp"

using namespace shapkit;

namespace {

/// Joint law as a comparable map from coordinate tuples to total mass.
std::map<std::vector<double>, double> joint_of(const discrete_distribution& d) {
  std::map<std::vector<double>, double> out;
  for (std::size_t i = 0; i < d.atom_count(); ++i) out[d.atom_values()[i]] += d.atom_probability(i);
  return out;
}

model_ptr expr(const std::string& source) { return std::make_shared<expression_model>(source); }

/// Skewed two-feature law: (5,5) with mass eps, (1,1) and (1,2) evenly
/// splitting the rest.
discrete_distribution skewed_pair(double eps) {
  return discrete_distribution::from_atoms(
      {{feature_vector{{"x", 5.0}, {"y", 5.0}}, eps},
       {feature_vector{{"x", 1.0}, {"y", 1.0}}, (1.0 - eps) / 2.0},
       {feature_vector{{"x", 1.0}, {"y", 2.0}}, (1.0 - eps) / 2.0}});
}

}  // namespace

TEST_CASE("empirical distribution weights distinct rows by multiplicity") {
  const dataset three({"x", "y"}, {{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}});
  const auto d3 = discrete_distribution::empirical(three);
  REQUIRE(d3.atom_count() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(d3.atom_probability(i) == doctest::Approx(1.0 / 3));

  const dataset one({"x"}, {{4.0}});
  const auto d1 = discrete_distribution::empirical(one);
  REQUIRE(d1.atom_count() == 1);
  CHECK(d1.atom_probability(0) == 1.0);

  const dataset dup({"x"}, {{1.0}, {1.0}, {2.0}});
  const auto dd = discrete_distribution::empirical(dup);
  REQUIRE(dd.atom_count() == 2);
  const auto joint = joint_of(dd);
  CHECK(joint.at({1.0}) == doctest::Approx(2.0 / 3));
  CHECK(joint.at({2.0}) == doctest::Approx(1.0 / 3));

  CHECK_THROWS_AS(discrete_distribution::empirical(dataset({"x"}, {})), error);
}

TEST_CASE("product of marginals factorizes a coupled law") {
  const auto coupled = discrete_distribution::from_atoms(
      {{feature_vector{{"x1", 0.0}, {"x2", 0.0}}, 0.5},
       {feature_vector{{"x1", 1.0}, {"x2", 1.0}}, 0.5}});
  const auto product = discrete_distribution::product_of_marginals(coupled);
  const auto joint = joint_of(product);
  REQUIRE(joint.size() == 4);
  CHECK(joint.at({1.0, 1.0}) == doctest::Approx(0.25));
  CHECK(joint.at({0.0, 1.0}) == doctest::Approx(0.25));

  // Already-independent input: the joint law is unchanged.
  const auto indep = discrete_distribution::independent(
      {{"x", {{0.0, 0.5}, {1.0, 0.5}}}, {"y", {{0.0, 0.5}, {1.0, 0.5}}}});
  const auto again = discrete_distribution::product_of_marginals(indep);
  CHECK(joint_of(again) == joint_of(indep));
}

TEST_CASE("materialization cap fails loudly") {
  std::vector<feature_marginal> wide;
  for (int i = 0; i < 4; ++i) {
    wide.push_back({"f" + std::to_string(i),
                    {{0.0, 0.25}, {1.0, 0.25}, {2.0, 0.25}, {3.0, 0.25}}});
  }
  // 4^4 = 256 joint atoms against a cap of 100.
  CHECK_THROWS_AS(discrete_distribution::independent(wide, 100), size_error);
}

TEST_CASE("conditional expectation over the skewed pair") {
  const auto d = skewed_pair(0.01);
  const auto f1 = expr("y ^ 2");
  const feature_vector x{{"x", 5.0}, {"y", 5.0}};
  const std::vector<std::string> universe{"x", "y"};

  const double unconditioned =
      d.conditional_expectation(*f1, x, feature_subset::empty_set(universe));
  CHECK(unconditioned == doctest::Approx(0.01 * 25 + 0.495 * 1 + 0.495 * 4));
  CHECK(d.expectation(*f1) == doctest::Approx(unconditioned));

  const double full = d.conditional_expectation(*f1, x, feature_subset::full_set(universe));
  CHECK(full == doctest::Approx(25.0));
}

TEST_CASE("conditioning on an unequal-marginals pair") {
  const double q = 0.6;
  // x and y independent: x is 2 with probability 0.3, y is 2 with q.
  const auto d = discrete_distribution::independent(
      {{"x", {{1.0, 0.7}, {2.0, 0.3}}}, {"y", {{1.0, 1.0 - q}, {2.0, q}}}});
  const auto f = expr("x + y");
  const feature_vector x{{"x", 2.0}, {"y", 2.0}};
  const feature_subset just_x({"x", "y"}, std::vector<std::string>{"x"});
  CHECK(d.conditional_expectation(*f, x, just_x) == doctest::Approx(3.0 + q));
}

TEST_CASE("zero probability conditioning raises") {
  const auto d = skewed_pair(0.01);
  const auto f = expr("x");
  const feature_vector outside{{"x", 9.0}, {"y", 9.0}};
  const feature_subset s({"x", "y"}, std::vector<std::string>{"x"});
  CHECK_THROWS_AS(d.conditional_expectation(*f, outside, s), conditioning_error);
}

TEST_CASE("law of total expectation on random finite laws") {
  rng_stream rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<feature_vector, double>> atoms;
    const int n_atoms = 2 + static_cast<int>(rng.uniform_index(4));
    std::vector<double> mass;
    double total = 0.0;
    for (int a = 0; a < n_atoms; ++a) {
      mass.push_back(0.05 + rng.uniform01());
      total += mass.back();
    }
    for (int a = 0; a < n_atoms; ++a) {
      atoms.push_back({feature_vector{{"u", std::floor(rng.uniform01() * 3)},
                                      {"w", std::floor(rng.uniform01() * 3)}},
                       mass[a] / total});
    }
    const auto d = discrete_distribution::from_atoms(atoms);
    const auto f = expr("u * w + u");
    const std::vector<std::string> universe{"u", "w"};
    const feature_subset s(universe, std::vector<std::string>{"u"});

    // Split E[f] by the observed values of u.
    double reconstructed = 0.0;
    std::map<double, double> mass_by_u;
    for (std::size_t i = 0; i < d.atom_count(); ++i)
      mass_by_u[d.atom(i).get("u")] += d.atom_probability(i);
    for (const auto& [value, prob] : mass_by_u) {
      const feature_vector probe{{"u", value}, {"w", 0.0}};
      reconstructed += prob * d.conditional_expectation(*f, probe, s);
    }
    CHECK(std::abs(reconstructed - d.expectation(*f)) <= 1e-9);
  }
}

TEST_CASE("marginalized conditioning matches the joint sum when independent") {
  rng_stream rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<feature_marginal> marginals;
    for (const char* name : {"a", "b", "c"}) {
      const double p = 0.2 + 0.6 * rng.uniform01();
      marginals.push_back({name, {{0.0, 1.0 - p}, {2.0, p}}});
    }
    const auto d = discrete_distribution::independent(std::move(marginals));
    const auto f = expr("a * b + b * c + a");
    const feature_vector x{{"a", 2.0}, {"b", 0.0}, {"c", 2.0}};
    const std::vector<std::string> universe{"a", "b", "c"};
    for (std::uint64_t mask = 0; mask < 8; ++mask) {
      const feature_subset s(universe, mask);
      const double joint = d.conditional_expectation(*f, x, s);
      const double marginalized = d.conditional_expectation_marginalized(*f, x, s);
      CHECK(std::abs(joint - marginalized) <= 1e-9);
    }
  }
}

TEST_CASE("two point epsilon law approaches the mixed vector value") {
  const auto f = expr("x * y ^ 2 + x");
  const feature_vector x{{"x", 2.0}, {"y", 3.0}};
  const feature_vector baseline{{"x", -1.0}, {"y", 1.0}};
  const std::vector<std::string> universe{"x", "y"};

  const auto d = discrete_distribution::two_point_epsilon(x, baseline, 1e-4);
  for (std::uint64_t mask = 0; mask < 4; ++mask) {
    const feature_subset s(universe, mask);
    // Mixed vector: explicand on s, baseline elsewhere.
    feature_vector mixed = baseline;
    for (const auto& name : s.members()) mixed.set(name, x.get(name));
    const double target = f->eval(mixed);
    const double got = d.conditional_expectation(*f, x, s);
    CHECK(std::abs(got - target) <= 1e-2 * std::max(1.0, std::abs(target)));
  }
}

TEST_CASE("atom probabilities must form a law") {
  CHECK_THROWS_AS(discrete_distribution::from_atoms(
                      {{feature_vector{{"x", 0.0}}, 0.6}, {feature_vector{{"x", 1.0}}, 0.6}}),
                  error);
  CHECK_THROWS_AS(discrete_distribution::from_atoms({{feature_vector{{"x", 0.0}}, -0.2},
                                                     {feature_vector{{"x", 1.0}}, 1.2}}),
                  error);
}
