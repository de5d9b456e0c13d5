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

#ifndef SHAPKIT_DISTRIBUTION_HPP
#define SHAPKIT_DISTRIBUTION_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "shapkit/dataset.hpp"
#include "shapkit/feature_vector.hpp"
#include "shapkit/model.hpp"

namespace shapkit {

enum class distribution_kind {
  explicit_atoms,
  empirical,
  independent,
  product_of_marginals,
  two_point_epsilon,
};

/// One feature's marginal: distinct values with positive probabilities.
struct feature_marginal {
  std::string feature;
  std::vector<std::pair<double, double>> atoms;  // (value, probability)
};

/// Finite distribution over feature vectors with an exact, fully
/// materialized support. Probabilities sum to 1 within 1e-12. Immutable.
class discrete_distribution {
 public:
  static constexpr std::size_t default_materialization_cap = 1000000;

  /// Explicit list of weighted support points.
  static discrete_distribution from_atoms(std::vector<std::pair<feature_vector, double>> atoms);

  /// Distinct dataset rows weighted by their (weighted) multiplicity.
  static discrete_distribution empirical(const dataset& data);

  /// Product of explicitly given per-feature marginals.
  static discrete_distribution independent(
      std::vector<feature_marginal> marginals,
      std::size_t materialization_cap = default_materialization_cap);

  /// Independent distribution with the same per-feature marginals as d.
  static discrete_distribution product_of_marginals(
      const discrete_distribution& d,
      std::size_t materialization_cap = default_materialization_cap);

  /// Independent per-feature two-point law: value x_i with probability eps,
  /// x'_i with probability 1 - eps (a single point where they coincide).
  static discrete_distribution two_point_epsilon(const feature_vector& x,
                                                 const feature_vector& baseline, double eps);

  distribution_kind kind() const { return kind_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t atom_count() const { return probs_.size(); }
  double atom_probability(std::size_t i) const { return probs_[i]; }
  feature_vector atom(std::size_t i) const;
  const std::vector<std::vector<double>>& atom_values() const { return values_; }

  /// Per-feature marginals; stored for the independent kinds, computed
  /// from the support otherwise.
  std::vector<feature_marginal> marginals() const;

  bool is_independent_kind() const;

  double expectation(const model& f) const;

  /// E[f(w) | w_S = x_S], an exact sum over the conditioned support.
  /// Throws conditioning_error when the event has zero probability.
  double conditional_expectation(const model& f, const feature_vector& x,
                                 const feature_subset& S) const;

  /// Same quantity for independent kinds, computed feature-by-feature over
  /// the complement marginals without touching the joint support.
  double conditional_expectation_marginalized(const model& f, const feature_vector& x,
                                              const feature_subset& S) const;

 private:
  discrete_distribution() = default;

  void validate_total_mass() const;

  distribution_kind kind_ = distribution_kind::explicit_atoms;
  std::vector<std::string> feature_names_;
  std::vector<std::vector<double>> values_;  // atom coordinates, aligned to feature_names_
  std::vector<double> probs_;
  std::vector<feature_marginal> marginals_;  // only for independent kinds
};

}  // namespace shapkit

#endif  // SHAPKIT_DISTRIBUTION_HPP
