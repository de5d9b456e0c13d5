/*
 * Copyright 2026 The shapkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHAPKIT_AXIOMS_HPP
#define SHAPKIT_AXIOMS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shapkit/dataset.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/feature_vector.hpp"
#include "shapkit/methods.hpp"
#include "shapkit/model.hpp"
#include "shapkit/pms.hpp"
#include "shapkit/shapley.hpp"

namespace shapkit {

enum class axiom_id {
  dummy,
  efficiency,
  linearity,
  symmetry,
  asi,
  demand_monotonicity,
  proportionality,
  strong_monotonicity,
};

std::vector<axiom_id> all_axioms();
std::string axiom_name(axiom_id id);
axiom_id axiom_from_name(const std::string& name);

/// Candidate values per feature, the domain over which antecedents
/// (dummy-ness, symmetry, monotonicity, sum-dependence) are brute-forced.
using value_grid = std::vector<std::pair<std::string, std::vector<double>>>;

/// The attribution method a check runs against, bound to its reference
/// frame (baseline or distribution). Checks re-run the method on derived
/// models and explicands, so the frame lives here rather than per call.
struct method_context {
  std::string method;  // bshap | rbshap | ces | ces_empirical | ig | pms | micro
  std::optional<feature_vector> baseline;
  std::optional<discrete_distribution> dist;
  std::optional<dataset> data;
  double tau = 0.0;
  ig_options ig;
  std::optional<possibility_predicate> poss;
  std::size_t micro_m = 4;
  engine_options engine;
};

/// Runs the context's method on f at x. The universe is x's feature order;
/// the baseline or distribution is projected onto it.
attribution run_in_context(const method_context& ctx, const model_ptr& f,
                           const feature_vector& x);

/// The value attributions are measured against: f(baseline) for baseline
/// methods, E_D[f] for distribution methods.
double reference_value(const method_context& ctx, const model_ptr& f,
                       const feature_vector& x);

/// Copy of d with column `feature` mapped through value -> scale*value+shift.
discrete_distribution transform_distribution(const discrete_distribution& d,
                                             const std::string& feature,
                                             double scale, double shift);

struct axiom_check {
  axiom_id axiom = axiom_id::dummy;
  method_context method;

  model_ptr f;
  model_ptr f2;  // linearity partner; strong monotonicity dominating model
  double combo_a = 1.0;
  double combo_b = 1.0;

  feature_vector explicand;
  std::optional<feature_vector> raised_explicand;  // demand monotonicity

  std::string feature;   // dummy / asi / demand / strong monotonicity target
  std::string feature2;  // symmetry partner

  double asi_scale = 1.0;
  double asi_shift = 0.0;

  /// Brute-force domain for discrete antecedents. Must cover every feature
  /// of the explicand for the checks that enumerate combinations.
  value_grid grid;

  /// Derivative-grid bounds for strong monotonicity.
  std::optional<std::pair<feature_vector, feature_vector>> box;
  std::size_t box_points = 33;

  /// Accept the antecedent without verification (continuous instances the
  /// grid cannot cover). Otherwise an unverifiable antecedent is an error.
  bool antecedent_asserted = false;

  double tolerance = 1e-9;
};

struct axiom_report {
  axiom_id axiom = axiom_id::dummy;
  std::string method;
  bool antecedent_holds = false;
  std::string antecedent_note;
  bool pass = false;
  double deviation = 0.0;
  std::string witness;
};

/// Verifies the antecedent (or honors the asserted flag), runs the method,
/// and measures the consequent. Unverifiable antecedents without the flag
/// raise instance_error; an antecedent that verifiably fails to hold does
/// too, since the check would be vacuous.
axiom_report check_axiom(const axiom_check& check);

}  // namespace shapkit

#endif  // SHAPKIT_AXIOMS_HPP
