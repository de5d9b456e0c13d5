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

#ifndef SHAPKIT_SHAPLEY_HPP
#define SHAPKIT_SHAPLEY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapkit/set_function.hpp"

namespace shapkit {

/// Per-feature scores with a record of how they were produced.
struct attribution {
  std::vector<std::string> features;
  std::vector<double> scores;
  std::string method;

  // Provenance of the run.
  std::string baseline_note;
  std::string distribution_note;
  std::size_t sample_count = 0;
  std::optional<std::uint64_t> seed;

  double score(const std::string& feature) const;
  double sum() const;
};

struct engine_options {
  /// Exact enumeration refuses universes above this size.
  std::size_t exact_cap = 20;
};

struct sampling_options {
  std::size_t n_perms = 1;
  std::uint64_t seed = 0;
  /// Walk every |N|! permutation exactly once instead of sampling.
  bool enumerate_all = false;
};

/// Coalition weight |S|!(n-|S|-1)!/n! for |S| = subset_size. Computed in
/// log space for large n so it stays finite up to the engine cap.
double shapley_subset_weight(std::size_t subset_size, std::size_t n);

/// Average marginal contribution under the subset-sum form, one memoized
/// evaluation per coalition.
attribution shapley_exact(const set_function& v, const engine_options& opts = {});

/// Mean of per-permutation marginal vectors. Deterministic for a given
/// seed; scores always sum to v(N) - v(empty) because every permutation
/// telescopes.
attribution shapley_sampled(const set_function& v, const sampling_options& opts);

/// Marginals along one fixed feature order.
attribution fixed_permutation_marginals(const set_function& v,
                                        const std::vector<std::string>& order);

}  // namespace shapkit

#endif  // SHAPKIT_SHAPLEY_HPP
