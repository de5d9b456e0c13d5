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

#include "shapkit/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "shapkit/dataset.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/methods.hpp"
#include "shapkit/model.hpp"
#include "shapkit/oracle.hpp"
#include "shapkit/pms.hpp"
#include "shapkit/set_function.hpp"
#include "shapkit/shapley.hpp"

namespace shapkit {

double scenario_entry::golden() const {
  if (pinned) return *pinned;
  if (closed_form) return *closed_form;
  if (oracle_value) return *oracle_value;
  throw argument_error("entry '" + key +
                       "' carries no golden value; build with oracles enabled");
}

namespace {

model_ptr expr_model(const std::string& source) {
  return std::make_shared<expression_model>(source);
}

model_ptr expr_model(const std::string& source, std::vector<std::string> features) {
  return std::make_shared<expression_model>(source, std::move(features));
}

scenario_entry pinned_entry(std::string key, double actual, double expected,
                            double tol) {
  scenario_entry e;
  e.key = std::move(key);
  e.actual = actual;
  e.pinned = expected;
  e.tol = tol;
  return e;
}

scenario_entry closed_entry(std::string key, double actual, double expected,
                            double tol) {
  scenario_entry e;
  e.key = std::move(key);
  e.actual = actual;
  e.closed_form = expected;
  e.tol = tol;
  return e;
}

// Structural fact encoded as 1.0 (holds) vs 0.0 with zero tolerance.
scenario_entry flag_entry(std::string key, bool holds) {
  return closed_entry(std::move(key), holds ? 1.0 : 0.0, 1.0, 0.0);
}

scenario_entry oracle_entry(std::string key, double actual, double tol,
                            bool with_oracle,
                            const std::function<double()>& compute) {
  scenario_entry e;
  e.key = std::move(key);
  e.actual = actual;
  e.tol = tol;
  if (with_oracle) e.oracle_value = compute();
  return e;
}

double max_abs_gap(const attribution& a, const attribution& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    gap = std::max(gap, std::abs(a.scores[i] - b.score(a.features[i])));
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Shared instances.

// Two-feature distribution whose conditional expectations give a dummy
// feature a large score: a rare explicand atom plus two near-duplicate rows
// that differ only in y.
discrete_distribution skewed_pair_dist(double eps) {
  return discrete_distribution::from_atoms(
      {{feature_vector{{"x", 5.0}, {"y", 5.0}}, eps},
       {feature_vector{{"x", 1.0}, {"y", 1.0}}, (1.0 - eps) / 2.0},
       {feature_vector{{"x", 1.0}, {"y", 2.0}}, (1.0 - eps) / 2.0}});
}

// Three equally likely rows where raising y lowers its own conditional score.
discrete_distribution demand_dist() {
  return discrete_distribution::from_atoms(
      {{feature_vector{{"x", 1.0}, {"y", 1.0}}, 1.0 / 3.0},
       {feature_vector{{"x", 1.0}, {"y", 0.0}}, 1.0 / 3.0},
       {feature_vector{{"x", 0.0}, {"y", 1.0}}, 1.0 / 3.0}});
}

// Independent two-valued marginals with unequal hit probabilities.
discrete_distribution unequal_marginals_dist(double p, double q) {
  return discrete_distribution::independent(
      {{"x", {{1.0, 1.0 - p}, {2.0, p}}}, {"y", {{1.0, 1.0 - q}, {2.0, q}}}});
}

// Uniform grid over {1,2,3} x {1,2}.
discrete_distribution box_grid_dist() {
  std::vector<std::pair<feature_vector, double>> atoms;
  for (double xv : {1.0, 2.0, 3.0}) {
    for (double yv : {1.0, 2.0}) {
      atoms.push_back({feature_vector{{"x", xv}, {"y", yv}}, 1.0 / 6.0});
    }
  }
  return discrete_distribution::from_atoms(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Scenario builders.

scenario_result dummy_failure(bool with_oracle) {
  scenario_result r;
  r.name = "dummy-failure";
  const double eps = 1e-6;
  const auto f = expr_model("y ^ 2", {"x", "y"});
  const feature_vector x{{"x", 5.0}, {"y", 5.0}};
  const feature_vector baseline{{"x", 1.0}, {"y", 1.0}};
  const auto d = skewed_pair_dist(eps);

  const attribution cond = ces(f, x, d);
  r.entries.push_back(oracle_entry("ces.x", cond.score("x"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f, x, d)[0];
  }));
  r.entries.push_back(oracle_entry("ces.y", cond.score("y"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f, x, d)[1];
  }));
  // Limiting scores as the explicand atom's probability vanishes.
  r.entries.push_back(pinned_entry("ces.x.limit", cond.score("x"), 11.25, 1e-3));
  r.entries.push_back(pinned_entry("ces.y.limit", cond.score("y"), 11.25, 1e-3));

  const attribution base = bshap(f, x, baseline);
  r.entries.push_back(closed_entry("bshap.x", base.score("x"), 0.0, 1e-12));

  // The model provably ignores x on the support, yet its conditional score
  // is far from zero.
  axiom_check chk;
  chk.axiom = axiom_id::dummy;
  chk.method.method = "ces";
  chk.method.dist = d;
  chk.f = f;
  chk.explicand = x;
  chk.feature = "x";
  chk.grid = {{"x", {1.0, 5.0}}, {"y", {1.0, 2.0, 5.0}}};
  const axiom_report rep = check_axiom(chk);
  r.entries.push_back(flag_entry("dummy_antecedent_verified", rep.antecedent_holds));
  r.entries.push_back(flag_entry("dummy_violated", !rep.pass));
  r.notes.push_back(
      "conditional scores reward x for predicting y; the mixed-baseline score is 0");
  return r;
}

scenario_result linearity_failure(bool with_oracle) {
  scenario_result r;
  r.name = "linearity-failure";
  const double eps = 1e-6;
  const auto d = skewed_pair_dist(eps);
  // Each addend is attributed over the features it actually reads; the sum
  // is attributed over both.
  const auto f1 = expr_model("y ^ 2");
  const auto f2 = expr_model("x");
  const auto sum = std::make_shared<sum_model>(
      std::vector<std::pair<double, model_ptr>>{{1.0, f1}, {1.0, f2}});

  const feature_vector xy{{"x", 5.0}, {"y", 5.0}};
  const feature_vector just_y{{"y", 5.0}};
  const feature_vector just_x{{"x", 5.0}};

  const attribution a1 = ces(f1, just_y, d);
  const attribution a2 = ces(f2, just_x, d);
  const attribution both = ces(sum, xy, d);

  r.entries.push_back(oracle_entry("ces_f1.y", a1.score("y"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f1, just_y, d)[0];
  }));
  r.entries.push_back(pinned_entry("ces_f1.y.limit", a1.score("y"), 22.5, 1e-3));
  r.entries.push_back(oracle_entry("ces_f2.x", a2.score("x"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f2, just_x, d)[0];
  }));
  r.entries.push_back(pinned_entry("ces_f2.x.limit", a2.score("x"), 4.0, 1e-3));
  r.entries.push_back(oracle_entry("ces_sum.x", both.score("x"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*sum, xy, d)[0];
  }));
  r.entries.push_back(oracle_entry("ces_sum.y", both.score("y"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*sum, xy, d)[1];
  }));
  r.entries.push_back(pinned_entry("ces_sum.y.limit", both.score("y"), 13.25, 1e-3));

  // y's score on the sum is nowhere near the sum of its per-addend scores.
  const double gap = std::abs(both.score("y") - (a1.score("y") + 0.0));
  r.entries.push_back(flag_entry("linearity_gap_large", gap > 1.0));

  axiom_check chk;
  chk.axiom = axiom_id::linearity;
  chk.method.method = "ces";
  chk.method.dist = d;
  chk.f = f1;
  chk.f2 = f2;
  chk.explicand = xy;
  const axiom_report rep = check_axiom(chk);
  r.entries.push_back(flag_entry("linearity_violated", !rep.pass));
  return r;
}

scenario_result demand_monotonicity_failure(bool with_oracle) {
  scenario_result r;
  r.name = "demand-monotonicity-failure";
  const auto d = demand_dist();
  const auto f = std::make_shared<linear_model>(
      0.0, std::vector<std::pair<std::string, double>>{{"x", 100.0}, {"y", 1.0}});
  const feature_vector low{{"x", 1.0}, {"y", 0.0}};
  const feature_vector high{{"x", 1.0}, {"y", 1.0}};

  const attribution a_low = ces(f, low, d);
  const attribution a_high = ces(f, high, d);

  r.entries.push_back(oracle_entry("ces.y.low", a_low.score("y"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f, low, d)[1];
  }));
  r.entries.push_back(
      closed_entry("ces.y.low.exact", a_low.score("y"), 193.0 / 12.0, 1e-9));
  r.entries.push_back(oracle_entry("ces.y.high", a_high.score("y"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f, high, d)[1];
  }));
  r.entries.push_back(
      closed_entry("ces.y.high.exact", a_high.score("y"), -95.0 / 12.0, 1e-9));
  // Raising y from 0 to 1 raises f yet lowers y's own score below zero.
  r.entries.push_back(flag_entry(
      "raising_y_lowers_score", a_high.score("y") < a_low.score("y")));
  r.entries.push_back(
      flag_entry("score_sign_flips", a_low.score("y") > 0.0 && a_high.score("y") < 0.0));

  axiom_check chk;
  chk.axiom = axiom_id::demand_monotonicity;
  chk.method.method = "ces";
  chk.method.dist = d;
  chk.f = f;
  chk.explicand = low;
  chk.raised_explicand = high;
  chk.feature = "y";
  chk.grid = {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}};
  const axiom_report rep = check_axiom(chk);
  r.entries.push_back(flag_entry("demand_monotonicity_violated", !rep.pass));
  return r;
}

scenario_result symmetry_failure(bool with_oracle) {
  scenario_result r;
  r.name = "symmetry-failure";
  const double p = 0.3;
  const double q = 0.6;
  const auto d = unequal_marginals_dist(p, q);
  const auto f = std::make_shared<linear_model>(
      0.0, std::vector<std::pair<std::string, double>>{{"x", 1.0}, {"y", 1.0}});
  const feature_vector x{{"x", 2.0}, {"y", 2.0}};

  const attribution a = ces(f, x, d);
  r.entries.push_back(oracle_entry("ces.x", a.score("x"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f, x, d)[0];
  }));
  r.entries.push_back(oracle_entry("ces.y", a.score("y"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*f, x, d)[1];
  }));
  // Scores are 1-p and 1-q: the rarer a feature's explicand value, the more
  // it earns, although the model treats x and y identically.
  r.entries.push_back(pinned_entry("ces.x.exact", a.score("x"), 0.7, 1e-12));
  r.entries.push_back(pinned_entry("ces.y.exact", a.score("y"), 0.4, 1e-12));

  axiom_check chk;
  chk.axiom = axiom_id::symmetry;
  chk.method.method = "ces";
  chk.method.dist = d;
  chk.f = f;
  chk.explicand = x;
  chk.feature = "x";
  chk.feature2 = "y";
  chk.grid = {{"x", {1.0, 2.0}}, {"y", {1.0, 2.0}}};
  const axiom_report rep = check_axiom(chk);
  r.entries.push_back(flag_entry("symmetry_antecedent_verified", rep.antecedent_holds));
  r.entries.push_back(flag_entry("symmetry_violated", !rep.pass));
  return r;
}

scenario_result strong_monotonicity_failure(bool with_oracle) {
  scenario_result r;
  r.name = "strong-monotonicity-failure";
  const auto d = box_grid_dist();
  const auto weak = expr_model("sqrt(x) + y", {"x", "y"});
  const auto strong = expr_model("x + y", {"x", "y"});
  const feature_vector x{{"x", 2.0}, {"y", 2.0}};

  const attribution a_weak = ces(weak, x, d);
  const attribution a_strong = ces(strong, x, d);

  const double weak_x_exact = (2.0 * std::sqrt(2.0) - 1.0 - std::sqrt(3.0)) / 3.0;
  r.entries.push_back(oracle_entry("ces_weak.x", a_weak.score("x"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*weak, x, d)[0];
  }));
  r.entries.push_back(
      pinned_entry("ces_weak.x.exact", a_weak.score("x"), weak_x_exact, 1e-9));
  r.entries.push_back(oracle_entry("ces_strong.x", a_strong.score("x"), 1e-9, with_oracle, [&] {
    return oracle::conditional_shapley(*strong, x, d)[0];
  }));
  // x is at the distribution mean of the steeper model, so its score
  // vanishes there while the flatter model still pays it.
  r.entries.push_back(pinned_entry("ces_strong.x.exact", a_strong.score("x"), 0.0, 1e-12));
  r.entries.push_back(flag_entry(
      "steeper_model_pays_less", std::abs(a_strong.score("x")) < std::abs(a_weak.score("x"))));

  axiom_check chk;
  chk.axiom = axiom_id::strong_monotonicity;
  chk.method.method = "ces";
  chk.method.dist = d;
  chk.f = weak;
  chk.f2 = strong;
  chk.explicand = x;
  chk.feature = "x";
  chk.box = {feature_vector{{"x", 1.0}, {"y", 1.0}}, feature_vector{{"x", 3.0}, {"y", 2.0}}};
  const axiom_report rep = check_axiom(chk);
  r.entries.push_back(flag_entry("derivative_dominance_verified", rep.antecedent_holds));
  r.entries.push_back(flag_entry("strong_monotonicity_violated", !rep.pass));
  r.notes.push_back("the distribution is independent, so the conditional and "
                    "mixed-baseline scores coincide here");
  return r;
}

scenario_result marginal_sum_remark(bool with_oracle) {
  scenario_result r;
  r.name = "marginal-sum-remark";
  const auto f = expr_model("x1 * x2", {"x1", "x2"});
  const auto joint = discrete_distribution::from_atoms(
      {{feature_vector{{"x1", 0.0}, {"x2", 0.0}}, 0.5},
       {feature_vector{{"x1", 1.0}, {"x2", 1.0}}, 0.5}});
  const auto product = discrete_distribution::product_of_marginals(joint);
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}};

  const attribution a_joint = rbshap(f, x, joint);
  const attribution a_product = rbshap(f, x, product);

  r.entries.push_back(oracle_entry("joint.x1", a_joint.score("x1"), 1e-9, with_oracle, [&] {
    return oracle::mixed_baseline_shapley(*f, x, joint)[0];
  }));
  r.entries.push_back(oracle_entry("joint.x2", a_joint.score("x2"), 1e-9, with_oracle, [&] {
    return oracle::mixed_baseline_shapley(*f, x, joint)[1];
  }));
  r.entries.push_back(oracle_entry("product.x1", a_product.score("x1"), 1e-9, with_oracle, [&] {
    return oracle::mixed_baseline_shapley(*f, x, product)[0];
  }));
  r.entries.push_back(oracle_entry("product.x2", a_product.score("x2"), 1e-9, with_oracle, [&] {
    return oracle::mixed_baseline_shapley(*f, x, product)[1];
  }));
  // The sum of scores moves with the reference distribution: f(x) minus the
  // mean of f under it.
  r.entries.push_back(pinned_entry("joint.sum", a_joint.sum(), 0.5, 1e-12));
  r.entries.push_back(pinned_entry("product.sum", a_product.sum(), 0.75, 1e-12));
  const double efficiency_gap =
      a_joint.sum() - (eval_model(*f, x) - joint.expectation(*f));
  r.entries.push_back(closed_entry("joint.efficiency_gap", efficiency_gap, 0.0, 1e-12));
  return r;
}

scenario_result min_remark(bool with_oracle) {
  scenario_result r;
  r.name = "min-remark";
  const auto f = expr_model("min(x1, x2)", {"x1", "x2"});
  const feature_vector x{{"x1", 5.0}, {"x2", 1.0}};
  const feature_vector baseline{{"x1", 0.0}, {"x2", 0.0}};

  const attribution grad = ig(f, x, baseline);
  r.entries.push_back(pinned_entry("ig.x1", grad.score("x1"), 0.0, 1e-9));
  r.entries.push_back(pinned_entry("ig.x2", grad.score("x2"), 1.0, 1e-9));

  const attribution base = bshap(f, x, baseline);
  r.entries.push_back(oracle_entry("bshap.x1", base.score("x1"), 1e-12, with_oracle, [&] {
    return oracle::baseline_shapley(*f, x, baseline)[0];
  }));
  r.entries.push_back(oracle_entry("bshap.x2", base.score("x2"), 1e-12, with_oracle, [&] {
    return oracle::baseline_shapley(*f, x, baseline)[1];
  }));
  r.entries.push_back(pinned_entry("bshap.x1.exact", base.score("x1"), 0.5, 1e-12));
  r.entries.push_back(pinned_entry("bshap.x2.exact", base.score("x2"), 0.5, 1e-12));

  // Cooperative reading: absent players do not cap the minimum at all,
  // instead of being pinned at the baseline.
  const std::vector<std::string> names{"x1", "x2"};
  const auto restricted_value = [&x](const feature_subset& s) {
    if (s.count() == 0) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& name : s.members()) m = std::min(m, x.get(name));
    return m;
  };
  const set_function restricted = set_function::total(names, restricted_value);
  const attribution coop = shapley_exact(restricted);
  r.entries.push_back(oracle_entry("restricted.x1", coop.score("x1"), 1e-12, with_oracle, [&] {
    return oracle::permutation_shapley(2, [&](std::uint64_t mask) {
      return restricted.value(mask);
    })[0];
  }));
  r.entries.push_back(oracle_entry("restricted.x2", coop.score("x2"), 1e-12, with_oracle, [&] {
    return oracle::permutation_shapley(2, [&](std::uint64_t mask) {
      return restricted.value(mask);
    })[1];
  }));
  r.entries.push_back(pinned_entry("restricted.x1.exact", coop.score("x1"), 2.5, 1e-12));
  r.entries.push_back(pinned_entry("restricted.x2.exact", coop.score("x2"), -1.5, 1e-12));
  r.notes.push_back(
      "three readings of min(5, 1) against a zero baseline, reported side by "
      "side: the path integral, the mixed-vector game, and the restricted "
      "game where absent features drop out of the minimum");
  return r;
}

scenario_result cube_remark(bool with_oracle) {
  scenario_result r;
  r.name = "cube-remark";
  const auto f = expr_model("(x1 + x2) ^ 3", {"x1", "x2"});
  const feature_vector x{{"x1", 5.0}, {"x2", 1.0}};
  const feature_vector baseline{{"x1", 0.0}, {"x2", 0.0}};

  const attribution base = bshap(f, x, baseline);
  r.entries.push_back(oracle_entry("bshap.x1", base.score("x1"), 1e-9, with_oracle, [&] {
    return oracle::baseline_shapley(*f, x, baseline)[0];
  }));
  r.entries.push_back(oracle_entry("bshap.x2", base.score("x2"), 1e-9, with_oracle, [&] {
    return oracle::baseline_shapley(*f, x, baseline)[1];
  }));
  r.entries.push_back(pinned_entry("bshap.x1.exact", base.score("x1"), 170.0, 1e-9));
  r.entries.push_back(pinned_entry("bshap.x2.exact", base.score("x2"), 46.0, 1e-9));

  const attribution grad = ig(f, x, baseline);
  r.entries.push_back(pinned_entry("ig.x1", grad.score("x1"), 180.0, 1e-3));
  r.entries.push_back(pinned_entry("ig.x2", grad.score("x2"), 36.0, 1e-3));
  r.notes.push_back("both methods agree on the total 216 but split it differently");
  return r;
}

scenario_result young_counterexample(bool with_oracle) {
  scenario_result r;
  r.name = "young-counterexample";
  const double eps = 1e-3;
  const auto f = expr_model("x1 * x2 * x3", {"x1", "x2", "x3"});
  std::vector<feature_marginal> marginals;
  for (const char* name : {"x1", "x2", "x3"}) {
    marginals.push_back({name, {{0.0, 1.0 - eps}, {1.0, eps}}});
  }
  const auto d = discrete_distribution::independent(std::move(marginals));
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}, {"x3", 1.0}};

  const set_function game = ces_game(f, x, d);
  const attribution averaged = shapley_exact(game);
  const attribution single =
      fixed_permutation_marginals(game, {"x1", "x2", "x3"});

  const double third = (1.0 - eps * eps * eps) / 3.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string name = "x" + std::to_string(i + 1);
    r.entries.push_back(oracle_entry("shapley." + name, averaged.score(name), 1e-9,
                                     with_oracle, [&, i] {
      return oracle::conditional_shapley(*f, x, d)[i];
    }));
    r.entries.push_back(closed_entry("shapley." + name + ".exact",
                                     averaged.score(name), third, 1e-9));
  }
  // Marginals of the single order x1, x2, x3: eps^2-eps^3, eps-eps^2, 1-eps.
  r.entries.push_back(closed_entry("fixed_order.x1", single.score("x1"),
                                   eps * eps - eps * eps * eps, 1e-12));
  r.entries.push_back(closed_entry("fixed_order.x2", single.score("x2"),
                                   eps - eps * eps, 1e-12));
  r.entries.push_back(closed_entry("fixed_order.x3", single.score("x3"),
                                   1.0 - eps, 1e-12));
  const double corner_gap = std::max(
      {std::abs(single.score("x1")), std::abs(single.score("x2")),
       std::abs(single.score("x3") - 1.0)});
  r.entries.push_back(flag_entry("single_order_near_corner", corner_gap <= 5e-3));
  const double thirds_gap = std::max(
      {std::abs(averaged.score("x1") - 1.0 / 3.0),
       std::abs(averaged.score("x2") - 1.0 / 3.0),
       std::abs(averaged.score("x3") - 1.0 / 3.0)});
  r.entries.push_back(flag_entry("averaged_near_thirds", thirds_gap <= 1e-9));
  r.notes.push_back("marginal contributions alone cannot pin down the "
                    "permutation-averaged value: one order concentrates "
                    "everything on the last joiner");
  return r;
}

scenario_result deepshap_order(bool with_oracle) {
  scenario_result r;
  r.name = "deepshap-order";
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}, {"x3", 1.0}};
  const feature_vector baseline{{"x1", 0.0}, {"x2", 0.0}, {"x3", 0.0}};

  // Same product, bracketed two ways.
  const auto left = std::make_shared<layered_model>(
      expr_model("h * x3", {"h", "x3"}),
      std::vector<std::pair<std::string, model_ptr>>{{"h", expr_model("x1 * x2", {"x1", "x2"})}});
  const auto right = std::make_shared<layered_model>(
      expr_model("x1 * g", {"x1", "g"}),
      std::vector<std::pair<std::string, model_ptr>>{{"g", expr_model("x2 * x3", {"x2", "x3"})}});
  const auto flat = expr_model("x1 * x2 * x3", {"x1", "x2", "x3"});

  const attribution a_left = compositional_bshap(left, x, baseline);
  const attribution a_right = compositional_bshap(right, x, baseline);
  const attribution a_flat = bshap(flat, x, baseline);

  r.entries.push_back(closed_entry("left.x1", a_left.score("x1"), 0.25, 1e-12));
  r.entries.push_back(closed_entry("left.x2", a_left.score("x2"), 0.25, 1e-12));
  r.entries.push_back(closed_entry("left.x3", a_left.score("x3"), 0.5, 1e-12));
  r.entries.push_back(closed_entry("right.x1", a_right.score("x1"), 0.5, 1e-12));
  r.entries.push_back(closed_entry("right.x2", a_right.score("x2"), 0.25, 1e-12));
  r.entries.push_back(closed_entry("right.x3", a_right.score("x3"), 0.25, 1e-12));
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string name = "x" + std::to_string(i + 1);
    r.entries.push_back(oracle_entry("flat." + name, a_flat.score(name), 1e-9,
                                     with_oracle, [&, i] {
      return oracle::baseline_shapley(*flat, x, baseline)[i];
    }));
    r.entries.push_back(
        closed_entry("flat." + name + ".exact", a_flat.score(name), 1.0 / 3.0, 1e-12));
  }
  r.notes.push_back("layer-by-layer attribution depends on how the network "
                    "brackets an associative product; attributing the "
                    "composed function does not");
  return r;
}

scenario_result kahneman(bool with_oracle) {
  scenario_result r;
  r.name = "kahneman";
  const double eps1 = 0.01;
  const double eps2 = 0.01;
  const auto row = [](double t, double u, double m) {
    return feature_vector{{"turnip", t}, {"ulcer", u}, {"medicine", m}};
  };
  // The patient and the spouse share one view of how the day could have
  // gone; the doctor holds another.
  const auto d_patient = discrete_distribution::from_atoms(
      {{row(1, 1, 0), eps1 * eps2},
       {row(1, 1, 1), eps1 * (1.0 - eps2)},
       {row(0, 1, 1), (1.0 - eps1) * (1.0 - eps2)},
       {row(0, 1, 0), (1.0 - eps1) * eps2}});
  const auto d_doctor = discrete_distribution::from_atoms(
      {{row(1, 1, 0), eps1 * eps2},
       {row(1, 0, 0), eps1 * (1.0 - eps2)},
       {row(0, 0, 0), (1.0 - eps1) * (1.0 - eps2)},
       {row(0, 1, 0), (1.0 - eps1) * eps2}});

  const auto pain_today = expr_model("ulcer * (1 - medicine)",
                                     {"turnip", "ulcer", "medicine"});
  const auto upset_spouse = expr_model("turnip * ulcer",
                                       {"turnip", "ulcer", "medicine"});
  const feature_vector x = row(1, 1, 0);

  struct run {
    const char* label;
    model_ptr f;
    const discrete_distribution* d;
    const char* expected_argmax;
    double expected_top;
  };
  const run runs[] = {
      {"patient", pain_today, &d_patient, "medicine", 1.0 - eps2},
      {"spouse", upset_spouse, &d_patient, "turnip", 1.0 - eps1},
      {"doctor", pain_today, &d_doctor, "ulcer", 1.0 - eps2},
  };
  for (const run& run_spec : runs) {
    const attribution a = ces(run_spec.f, x, *run_spec.d);
    for (std::size_t i = 0; i < a.features.size(); ++i) {
      r.entries.push_back(oracle_entry(
          std::string(run_spec.label) + "." + a.features[i], a.scores[i], 1e-9,
          with_oracle, [&, i] {
            return oracle::conditional_shapley(*run_spec.f, x, *run_spec.d)[i];
          }));
    }
    r.entries.push_back(pinned_entry(
        std::string(run_spec.label) + "." + run_spec.expected_argmax + ".top",
        a.score(run_spec.expected_argmax), run_spec.expected_top, 1e-9));
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < a.scores.size(); ++i) {
      if (std::abs(a.scores[i]) > std::abs(a.scores[argmax])) argmax = i;
    }
    r.entries.push_back(flag_entry(
        std::string(run_spec.label) + ".argmax_is_" + run_spec.expected_argmax,
        a.features[argmax] == run_spec.expected_argmax));
  }
  r.notes.push_back("three observers explain the same bad day through their "
                    "own reference distributions and models");
  return r;
}

scenario_result pms_impossible_everywhere(bool with_oracle) {
  scenario_result r;
  r.name = "pms-impossible-everywhere";
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<std::pair<std::string, double>> coeffs;
    std::vector<std::string> names;
    feature_vector x;
    feature_vector baseline;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string name = "x" + std::to_string(i + 1);
      names.push_back(name);
      coeffs.push_back({name, static_cast<double>(i + 1)});
      x.set(name, 1.0);
      baseline.set(name, 0.0);
    }
    const auto f = std::make_shared<linear_model>(0.0, coeffs);
    // Only the two endpoints are possible, so every permutation defers the
    // whole change to one flush and the value splits equally.
    const auto poss = possibility_predicate::from_allowed_rows({x, baseline});
    const attribution a = pms(f, x, baseline, poss);

    const double total = eval_model(*f, x) - eval_model(*f, baseline);
    const double share = total / static_cast<double>(n);
    const std::string prefix = "n" + std::to_string(n) + ".";
    for (const auto& name : names) {
      r.entries.push_back(
          closed_entry(prefix + name, a.score(name), share, 1e-12));
    }
    const std::uint64_t full = (1ull << n) - 1;
    for (std::size_t i = 0; i < n; ++i) {
      r.entries.push_back(oracle_entry(
          prefix + names[i] + ".oracle", a.score(names[i]), 1e-9, with_oracle,
          [&, i, full]() {
            return oracle::possible_marginals(
                n, [&](std::uint64_t mask) -> std::optional<double> {
                  if (mask != 0 && mask != full) return std::nullopt;
                  return oracle::mixed_value(*f, x, baseline, mask);
                })[i];
          }));
    }
    r.entries.push_back(
        closed_entry(prefix + "efficiency_gap", a.sum() - total, 0.0, 1e-12));
  }
  return r;
}

scenario_result pms_boolean_3(bool with_oracle) {
  scenario_result r;
  r.name = "pms-boolean-3";
  const auto f = expr_model("x3", {"x1", "x2", "x3"});
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}, {"x3", 1.0}};
  const feature_vector baseline{{"x1", 0.0}, {"x2", 0.0}, {"x3", 0.0}};
  // A row is possible unless x1 is off while x2 is on.
  const auto poss =
      possibility_predicate::from_expression("!(x1 == 0 && x2 == 1)");

  const set_function game = pms_game(f, x, baseline, poss);
  const attribution a = possible_marginals_shapley(game);

  r.entries.push_back(closed_entry("pms.x1", a.score("x1"), 1.0 / 12.0, 1e-12));
  r.entries.push_back(closed_entry("pms.x2", a.score("x2"), 1.0 / 12.0, 1e-12));
  r.entries.push_back(closed_entry("pms.x3", a.score("x3"), 5.0 / 6.0, 1e-12));
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string name = "x" + std::to_string(i + 1);
    r.entries.push_back(oracle_entry("pms." + name + ".oracle", a.score(name),
                                     1e-9, with_oracle, [&, i] {
      return oracle::possible_marginals(3, [&](std::uint64_t mask) {
        return game.evaluate(mask);
      })[i];
    }));
  }
  r.entries.push_back(closed_entry("efficiency_gap", a.sum() - 1.0, 0.0, 1e-12));

  // Filling in the impossible coalitions and running the plain engine gives
  // a different split, so the completion diagnostic reports a disagreement.
  const attribution completed = shapley_exact(completed_set_function(game));
  r.entries.push_back(
      closed_entry("completed.x1", completed.score("x1"), 1.0 / 6.0, 1e-12));
  r.entries.push_back(
      closed_entry("completed.x2", completed.score("x2"), -1.0 / 12.0, 1e-12));
  r.entries.push_back(
      closed_entry("completed.x3", completed.score("x3"), 11.0 / 12.0, 1e-12));
  const completion_report diag = compare_with_completion(game);
  r.entries.push_back(flag_entry("completion_diagnostic_disagrees", !diag.agreed));
  r.notes.push_back("the averaged completion and the pending-block walk "
                    "split the same game differently; the diagnostic is "
                    "informational, not a gate");
  return r;
}

scenario_result pms_boolean_n(bool with_oracle) {
  scenario_result r;
  r.name = "pms-boolean-n";
  const std::size_t n = 4;
  const auto f = expr_model("x3", {"x1", "x2", "x3", "x4"});
  feature_vector x;
  feature_vector baseline;
  for (std::size_t i = 1; i <= n; ++i) {
    x.set("x" + std::to_string(i), 1.0);
    baseline.set("x" + std::to_string(i), 0.0);
  }
  // Mixed rows where exactly one of the first two features moved are
  // impossible.
  const auto poss = possibility_predicate::from_expression("x1 == x2");
  const set_function game = pms_game(f, x, baseline, poss);
  const attribution a = possible_marginals_shapley(game);

  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = "x" + std::to_string(i + 1);
    r.entries.push_back(
        oracle_entry("pms." + name, a.score(name), 1e-9, with_oracle, [&, i] {
          return oracle::possible_marginals(n, [&](std::uint64_t mask) {
            return game.evaluate(mask);
          })[i];
        }));
  }
  r.entries.push_back(closed_entry("efficiency_gap", a.sum() - 1.0, 0.0, 1e-12));
  // x1 and x2 play interchangeable roles in the predicate and neither moves
  // the model.
  r.entries.push_back(closed_entry(
      "tied_pair_gap", std::abs(a.score("x1") - a.score("x2")), 0.0, 1e-12));
  // x4 affects neither the predicate nor the model and never unblocks
  // anything, so it earns exactly nothing.
  r.entries.push_back(closed_entry("pms.x4.exact", a.score("x4"), 0.0, 1e-12));
  return r;
}

scenario_result sparsity_equal_split(bool with_oracle) {
  scenario_result r;
  r.name = "sparsity-equal-split";
  const auto f = std::make_shared<linear_model>(
      0.0, std::vector<std::pair<std::string, double>>{{"x", 100.0}, {"y", 1.0}});
  const dataset rows({"x", "y"}, {{1.0, 10.0}, {2.0, 20.0}, {3.0, 30.0}});
  const feature_vector x{{"x", 4.5}, {"y", 7.0}};

  const attribution a = ces_empirical(f, x, rows, 0.0);
  // No data row matches the explicand on any coordinate, so every proper
  // conditional collapses to the explicand's own appended row and the lift
  // over the pooled mean splits evenly.
  const double mean_with_explicand = (110.0 + 220.0 + 330.0 + 457.0) / 4.0;
  const double share = (457.0 - mean_with_explicand) / 2.0;
  r.entries.push_back(closed_entry("ces_empirical.x", a.score("x"), share, 1e-12));
  r.entries.push_back(closed_entry("ces_empirical.y", a.score("y"), share, 1e-12));
  r.entries.push_back(oracle_entry("ces_empirical.x.oracle", a.score("x"), 1e-9,
                                   with_oracle, [&] {
    return oracle::empirical_conditional_shapley(*f, x, rows, 0.0)[0];
  }));
  r.entries.push_back(oracle_entry("ces_empirical.y.oracle", a.score("y"), 1e-9,
                                   with_oracle, [&] {
    return oracle::empirical_conditional_shapley(*f, x, rows, 0.0)[1];
  }));
  r.entries.push_back(closed_entry(
      "equal_split_gap", std::abs(a.score("x") - a.score("y")), 0.0, 1e-12));

  // The model itself is far from symmetric: against a plain baseline the
  // two features earn very different scores.
  const attribution base = bshap(f, x, feature_vector{{"x", 1.0}, {"y", 10.0}});
  r.entries.push_back(closed_entry("bshap.x", base.score("x"), 350.0, 1e-12));
  r.entries.push_back(closed_entry("bshap.y", base.score("y"), -3.0, 1e-12));
  return r;
}

scenario_result bshap_as_ces_epsilon(bool with_oracle) {
  scenario_result r;
  r.name = "bshap-as-ces-epsilon";
  const auto f = expr_model("x * y ^ 2 + x", {"x", "y"});
  const feature_vector x{{"x", 2.0}, {"y", 3.0}};
  const feature_vector baseline{{"x", 1.0}, {"y", 1.0}};

  const attribution base = bshap(f, x, baseline);
  r.entries.push_back(closed_entry("bshap.x", base.score("x"), 6.0, 1e-12));
  r.entries.push_back(closed_entry("bshap.y", base.score("y"), 12.0, 1e-12));

  const double eps_values[] = {1e-2, 1e-3, 1e-4};
  double deviations[3] = {0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    const auto d = discrete_distribution::two_point_epsilon(x, baseline, eps_values[k]);
    const attribution cond = ces(f, x, d);
    deviations[k] = max_abs_gap(cond, base);
    const std::string suffix = std::to_string(k + 2);  // eps = 10^-suffix
    r.entries.push_back(oracle_entry("ces_eps" + suffix + ".x", cond.score("x"),
                                     1e-9, with_oracle, [&] {
      return oracle::conditional_shapley(*f, x, d)[0];
    }));
    r.entries.push_back(oracle_entry("ces_eps" + suffix + ".y", cond.score("y"),
                                     1e-9, with_oracle, [&] {
      return oracle::conditional_shapley(*f, x, d)[1];
    }));
  }
  // The conditional scores under the two-point sharpening converge to the
  // mixed-baseline scores as the off probability vanishes.
  r.entries.push_back(flag_entry(
      "deviation_decreases",
      deviations[0] > deviations[1] && deviations[1] > deviations[2]));
  double scale = 0.0;
  for (double s : base.scores) scale = std::max(scale, std::abs(s));
  r.entries.push_back(flag_entry("final_relative_deviation_small",
                                 deviations[2] <= 1e-2 * scale));
  return r;
}

scenario_result rbshap_equals_ces_independent(bool with_oracle) {
  scenario_result r;
  r.name = "rbshap-equals-ces-independent";
  const auto f = expr_model("x1 * x2", {"x1", "x2"});
  const auto d = discrete_distribution::independent(
      {{"x1", {{0.0, 0.5}, {1.0, 0.5}}}, {"x2", {{0.0, 0.5}, {1.0, 0.5}}}});
  const feature_vector x{{"x1", 1.0}, {"x2", 1.0}};

  const attribution mixed = rbshap(f, x, d);
  const attribution cond = ces(f, x, d);
  r.entries.push_back(closed_entry("ces.x1", cond.score("x1"), 0.375, 1e-12));
  r.entries.push_back(closed_entry("ces.x2", cond.score("x2"), 0.375, 1e-12));
  r.entries.push_back(oracle_entry("rbshap.x1", mixed.score("x1"), 1e-9, with_oracle, [&] {
    return oracle::mixed_baseline_shapley(*f, x, d)[0];
  }));
  r.entries.push_back(oracle_entry("rbshap.x2", mixed.score("x2"), 1e-9, with_oracle, [&] {
    return oracle::mixed_baseline_shapley(*f, x, d)[1];
  }));
  // Independence collapses the conditional game onto the mixture of
  // baseline games.
  r.entries.push_back(
      closed_entry("max_method_gap", max_abs_gap(mixed, cond), 0.0, 1e-9));
  return r;
}

scenario_result micro_convergence(bool with_oracle) {
  scenario_result r;
  r.name = "micro-convergence";
  const auto f = expr_model("(x1 + x2) ^ 3", {"x1", "x2"});
  const feature_vector x{{"x1", 5.0}, {"x2", 1.0}};
  const feature_vector baseline{{"x1", 0.0}, {"x2", 0.0}};

  const attribution reference = ig(f, x, baseline);
  const attribution base = bshap(f, x, baseline);

  const std::size_t levels[] = {1, 4, 16, 64};
  double errors[4] = {0, 0, 0, 0};
  for (int k = 0; k < 4; ++k) {
    const attribution micro = micro_shapley(f, x, baseline, levels[k]);
    errors[k] = max_abs_gap(micro, reference);
    if (levels[k] == 1) {
      r.entries.push_back(closed_entry("m1_matches_bshap_gap",
                                       max_abs_gap(micro, base), 0.0, 1e-12));
    }
    if (levels[k] <= 4) {
      for (std::size_t i = 0; i < 2; ++i) {
        const std::string name = "x" + std::to_string(i + 1);
        r.entries.push_back(oracle_entry(
            "micro_m" + std::to_string(levels[k]) + "." + name,
            micro.score(name), 1e-9, with_oracle, [&, i, k] {
              return oracle::micro_grid_shapley(*f, x, baseline, levels[k])[i];
            }));
      }
    }
  }
  // Splitting each feature finer walks the grid value toward the path
  // integral.
  r.entries.push_back(flag_entry("errors_strictly_decrease",
                                 errors[0] > errors[1] && errors[1] > errors[2] &&
                                     errors[2] > errors[3]));
  double ig_scale = 0.0;
  for (double s : reference.scores) ig_scale = std::max(ig_scale, std::abs(s));
  r.entries.push_back(
      flag_entry("final_error_under_one_percent", errors[3] <= 0.01 * ig_scale));
  return r;
}

scenario_result reduction_roundtrip(bool with_oracle) {
  scenario_result r;
  r.name = "reduction-roundtrip";
  const auto f = expr_model("x * y + 2 * x - 3 * y + z ^ 2 - 2 * z", {"x", "y", "z"});
  const feature_vector x{{"x", 2.0}, {"y", 1.0}, {"z", 3.0}};
  const feature_vector baseline{{"x", -1.0}, {"y", 2.0}, {"z", 0.0}};

  const attribution direct = bshap(f, x, baseline);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string name = direct.features[i];
    r.entries.push_back(oracle_entry("bshap." + name, direct.scores[i], 1e-9,
                                     with_oracle, [&, i] {
      return oracle::baseline_shapley(*f, x, baseline)[i];
    }));
  }

  const cost_sharing_reduction red = reduce_to_cost_sharing(f, x, baseline);
  const attribution a1 = bshap(red.f1, red.explicand, red.baseline);
  const attribution a2 = bshap(red.f2, red.explicand, red.baseline);
  double roundtrip_gap = 0.0;
  for (std::size_t i = 0; i < direct.features.size(); ++i) {
    const std::string& name = direct.features[i];
    roundtrip_gap = std::max(
        roundtrip_gap,
        std::abs(direct.scores[i] - (a1.score(name) - a2.score(name))));
  }
  // Attributions of the original pair equal the difference of attributions
  // of the two nondecreasing games on the folded instance.
  r.entries.push_back(closed_entry("roundtrip_gap", roundtrip_gap, 0.0, 1e-9));
  const feature_vector zero = red.baseline;
  r.entries.push_back(flag_entry(
      "f1_nondecreasing", grid_nondecreasing(*red.f1, zero, red.explicand)));
  r.entries.push_back(flag_entry(
      "f2_nondecreasing", grid_nondecreasing(*red.f2, zero, red.explicand)));
  r.entries.push_back(closed_entry(
      "efficiency_gap",
      direct.sum() - (eval_model(*f, x) - eval_model(*f, baseline)), 0.0, 1e-12));
  return r;
}

struct scenario_registration {
  const char* name;
  scenario_result (*build)(bool);
};

constexpr scenario_registration kRegistry[] = {
    {"dummy-failure", dummy_failure},
    {"linearity-failure", linearity_failure},
    {"demand-monotonicity-failure", demand_monotonicity_failure},
    {"symmetry-failure", symmetry_failure},
    {"strong-monotonicity-failure", strong_monotonicity_failure},
    {"marginal-sum-remark", marginal_sum_remark},
    {"min-remark", min_remark},
    {"cube-remark", cube_remark},
    {"young-counterexample", young_counterexample},
    {"deepshap-order", deepshap_order},
    {"kahneman", kahneman},
    {"pms-impossible-everywhere", pms_impossible_everywhere},
    {"pms-boolean-3", pms_boolean_3},
    {"pms-boolean-n", pms_boolean_n},
    {"sparsity-equal-split", sparsity_equal_split},
    {"bshap-as-ces-epsilon", bshap_as_ces_epsilon},
    {"rbshap-equals-ces-independent", rbshap_equals_ces_independent},
    {"micro-convergence", micro_convergence},
    {"reduction-roundtrip", reduction_roundtrip},
};

std::string registry_listing() {
  std::string out;
  for (const auto& reg : kRegistry) {
    if (!out.empty()) out += ", ";
    out += reg.name;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& reg : kRegistry) out.push_back(reg.name);
    return out;
  }();
  return names;
}

scenario_result build_scenario(const std::string& name, bool with_oracle) {
  for (const auto& reg : kRegistry) {
    if (name == reg.name) return reg.build(with_oracle);
  }
  throw lookup_error("unknown scenario '" + name + "'; registered: " +
                     registry_listing());
}

scenario_report run_scenario(const std::string& name,
                             const std::string& golden_path) {
  const scenario_result built = build_scenario(name, false);

  std::ifstream in(golden_path);
  if (!in) throw io_error("cannot open golden file '" + golden_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("golden file '" + golden_path + "': " + e.what());
  }
  if (!doc.contains("scenarios") || !doc["scenarios"].contains(name)) {
    throw io_error("golden file '" + golden_path + "' has no entries for '" +
                   name + "'; regenerate it");
  }

  struct golden_row {
    double expected;
    double tol;
    std::string provenance;
  };
  std::map<std::string, golden_row> golden;
  for (const auto& row : doc["scenarios"][name]) {
    golden[row.at("key").get<std::string>()] = {
        row.at("expected").get<double>(), row.at("tol").get<double>(),
        row.at("provenance").get<std::string>()};
  }

  scenario_report report;
  report.name = name;
  report.notes = built.notes;
  report.pass = true;
  for (const auto& entry : built.entries) {
    const auto it = golden.find(entry.key);
    if (it == golden.end()) {
      throw io_error("golden file is missing key '" + entry.key +
                     "' for scenario '" + name + "'; regenerate it");
    }
    if (it->second.provenance != entry.provenance()) {
      throw io_error("golden provenance mismatch on '" + entry.key +
                     "'; regenerate the golden file");
    }
    scenario_check check;
    check.key = entry.key;
    check.actual = entry.actual;
    check.expected = it->second.expected;
    check.tol = it->second.tol;
    check.provenance = it->second.provenance;
    check.deviation = std::abs(entry.actual - check.expected);
    check.pass = check.deviation <= check.tol;
    if (!std::isfinite(check.deviation)) check.pass = false;
    report.pass = report.pass && check.pass;
    report.checks.push_back(std::move(check));
    golden.erase(it);
  }
  if (!golden.empty()) {
    throw io_error("golden file has " + std::to_string(golden.size()) +
                   " stale key(s) for scenario '" + name +
                   "' (first: '" + golden.begin()->first + "'); regenerate it");
  }
  return report;
}

std::size_t write_golden_file(const std::string& golden_path, double gate) {
  nlohmann::ordered_json scenarios = nlohmann::ordered_json::object();
  std::vector<std::string> violations;
  std::size_t count = 0;

  for (const auto& reg : kRegistry) {
    const scenario_result built = reg.build(/*with_oracle=*/true);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& entry : built.entries) {
      if (entry.oracle_value) {
        const double gap = std::abs(entry.actual - *entry.oracle_value);
        if (!(gap <= gate)) {
          std::ostringstream msg;
          msg.precision(17);
          msg << built.name << "/" << entry.key << ": engine=" << entry.actual
              << " oracle=" << *entry.oracle_value << " |gap|=" << gap;
          violations.push_back(msg.str());
        }
      }
      nlohmann::ordered_json row;
      row["key"] = entry.key;
      row["expected"] = entry.golden();
      row["tol"] = entry.tol;
      row["provenance"] = entry.provenance();
      rows.push_back(std::move(row));
      ++count;
    }
    scenarios[built.name] = std::move(rows);
  }

  if (!violations.empty()) {
    std::string msg = "engine disagrees with the brute-force oracle:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw error(msg);
  }

  nlohmann::ordered_json doc;
  doc["format"] = "shapkit-golden-v1";
  doc["gate"] = gate;
  doc["scenarios"] = std::move(scenarios);

  std::ofstream out(golden_path);
  if (!out) throw io_error("cannot write golden file '" + golden_path + "'");
  out << doc.dump(2) << "\n";
  if (!out) throw io_error("failed writing golden file '" + golden_path + "'");
  return count;
}

// ---------------------------------------------------------------------------
// Named axiom instances.

namespace {

struct axiom_instance {
  model_ptr f;
  model_ptr f2;
  feature_vector explicand;
  std::optional<feature_vector> raised;
  feature_vector baseline;
  std::optional<discrete_distribution> dist;
  std::string feature;
  std::string feature2;
  value_grid grid;
  std::optional<std::pair<feature_vector, feature_vector>> box;
};

axiom_instance build_instance(const std::string& name) {
  axiom_instance inst;
  if (name == "table1") {
    inst.f = expr_model("y ^ 2", {"x", "y"});
    inst.f2 = expr_model("x");
    inst.explicand = {{"x", 5.0}, {"y", 5.0}};
    inst.baseline = {{"x", 1.0}, {"y", 1.0}};
    inst.dist = skewed_pair_dist(1e-6);
    inst.feature = "x";
    inst.feature2 = "y";
    inst.grid = {{"x", {1.0, 5.0}}, {"y", {1.0, 2.0, 5.0}}};
    return inst;
  }
  if (name == "table3") {
    inst.f = std::make_shared<linear_model>(
        0.0, std::vector<std::pair<std::string, double>>{{"x", 100.0}, {"y", 1.0}});
    inst.f2 = inst.f;
    inst.explicand = {{"x", 1.0}, {"y", 0.0}};
    inst.raised = feature_vector{{"x", 1.0}, {"y", 1.0}};
    inst.baseline = {{"x", 0.0}, {"y", 1.0}};
    inst.dist = demand_dist();
    inst.feature = "y";
    inst.feature2 = "x";
    inst.grid = {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}};
    return inst;
  }
  if (name == "table4") {
    inst.f = std::make_shared<linear_model>(
        0.0, std::vector<std::pair<std::string, double>>{{"x", 1.0}, {"y", 1.0}});
    inst.f2 = inst.f;
    inst.explicand = {{"x", 2.0}, {"y", 2.0}};
    inst.baseline = {{"x", 1.0}, {"y", 1.0}};
    inst.dist = unequal_marginals_dist(0.3, 0.6);
    inst.feature = "x";
    inst.feature2 = "y";
    inst.grid = {{"x", {1.0, 2.0}}, {"y", {1.0, 2.0}}};
    return inst;
  }
  if (name == "table5") {
    inst.f = expr_model("sqrt(x) + y", {"x", "y"});
    inst.f2 = expr_model("x + y", {"x", "y"});
    inst.explicand = {{"x", 2.0}, {"y", 2.0}};
    inst.baseline = {{"x", 1.0}, {"y", 1.0}};
    inst.dist = box_grid_dist();
    inst.feature = "x";
    inst.feature2 = "y";
    inst.grid = {{"x", {1.0, 2.0, 3.0}}, {"y", {1.0, 2.0}}};
    inst.box = {feature_vector{{"x", 1.0}, {"y", 1.0}},
                feature_vector{{"x", 3.0}, {"y", 2.0}}};
    return inst;
  }
  if (name == "diabetes") {
    const std::vector<std::string> names{"age", "sex", "bmi", "bp", "s1",
                                         "s2",  "s3",  "s4",  "s5", "s6"};
    std::vector<std::pair<std::string, double>> coeffs;
    for (const auto& n : names) coeffs.push_back({n, 0.0});
    const auto set_coeff = [&](const std::string& n, double c) {
      for (auto& pair : coeffs) {
        if (pair.first == n) pair.second = c;
      }
    };
    set_coeff("bmi", 399.0);
    set_coeff("bp", 4.9);
    set_coeff("s5", 291.0);
    inst.f = std::make_shared<linear_model>(154.15, coeffs);
    inst.f2 = inst.f;
    for (const auto& n : names) {
      inst.explicand.set(n, 1.0);
      inst.baseline.set(n, 0.0);
      inst.grid.push_back({n, {0.0, 1.0}});
    }
    inst.raised = inst.explicand.with("age", 2.0);
    inst.feature = "age";
    inst.feature2 = "sex";
    return inst;
  }
  throw lookup_error("unknown axiom instance '" + name +
                     "'; registered: table1, table3, table4, table5, diabetes");
}

}  // namespace

const std::vector<std::string>& axiom_instance_names() {
  static const std::vector<std::string> names{"table1", "table3", "table4",
                                              "table5", "diabetes"};
  return names;
}

axiom_check make_axiom_instance(const std::string& instance, axiom_id axiom,
                                const std::string& method) {
  axiom_instance inst = build_instance(instance);
  axiom_check chk;
  chk.axiom = axiom;
  chk.method.method = method;
  chk.method.baseline = inst.baseline;
  chk.method.dist = inst.dist;
  if (method == "ces_empirical" && inst.dist) {
    // Materialize the instance distribution as a weighted dataset.
    std::vector<std::vector<double>> rows;
    std::vector<double> weights;
    for (std::size_t i = 0; i < inst.dist->atom_count(); ++i) {
      const feature_vector atom = inst.dist->atom(i);
      std::vector<double> row;
      for (const auto& n : atom.names()) row.push_back(atom.get(n));
      rows.push_back(std::move(row));
      weights.push_back(inst.dist->atom_probability(i));
    }
    chk.method.data = dataset(inst.dist->feature_names(), rows, weights);
  }
  if (method == "pms") chk.method.poss = possibility_predicate::always_possible();
  chk.f = inst.f;
  chk.f2 = inst.f2;
  chk.explicand = inst.explicand;
  chk.raised_explicand = inst.raised;
  chk.feature = inst.feature;
  chk.feature2 = inst.feature2;
  chk.asi_scale = 2.0;
  chk.asi_shift = 1.0;
  chk.grid = inst.grid;
  chk.box = inst.box;
  if (method == "ig" || method == "micro") chk.tolerance = 1e-3;
  return chk;
}

}  // namespace shapkit
