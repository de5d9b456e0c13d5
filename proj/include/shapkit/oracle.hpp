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

#ifndef SHAPKIT_ORACLE_HPP
#define SHAPKIT_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shapkit/dataset.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/feature_vector.hpp"
#include "shapkit/model.hpp"

// Brute-force reference implementations used to pin golden values. Every
// routine here walks all |N|! permutations directly and builds its own
// coalition values from first principles; none of them call into the
// subset-weight engine or the method games they are used to check.
namespace shapkit::oracle {

/// Mean over all n! permutations of the per-step marginal, attributed to
/// the feature that joins. n is capped at 10.
std::vector<double> permutation_shapley(
    std::size_t n, const std::function<double(std::uint64_t)>& value);

/// Marginals along a single feature order.
std::vector<double> fixed_order_marginals(
    const std::vector<std::size_t>& order,
    const std::function<double(std::uint64_t)>& value);

/// Permutation walk that defers marginals across impossible coalitions:
/// pending features accumulate until the coalition is possible again, and
/// the flushed marginal goes wholly to the newest feature when it is alone,
/// else half to it and half to the oldest pending one.
std::vector<double> possible_marginals(
    std::size_t n,
    const std::function<std::optional<double>(std::uint64_t)>& value);

/// Wraps a coalition value function with an exact cache.
std::function<double(std::uint64_t)> memoized(
    std::function<double(std::uint64_t)> value);

/// f(x_S; x'_{N\S}) over x's feature order, composed locally.
double mixed_value(const model& f, const feature_vector& x,
                   const feature_vector& baseline, std::uint64_t mask);

/// Permutation-averaged Shapley of the mixed-vector game.
std::vector<double> baseline_shapley(const model& f, const feature_vector& x,
                                     const feature_vector& baseline);

/// E[f | w_S = x_S] by direct weighted sums over the support, restricted to
/// the universe's columns. Empty conditioned mass is an error.
double conditional_value(const model& f, const discrete_distribution& d,
                         const feature_vector& x,
                         const std::vector<std::string>& universe,
                         std::uint64_t mask);

/// Permutation-averaged Shapley of the conditional-expectation game over
/// the explicand's features.
std::vector<double> conditional_shapley(const model& f,
                                        const feature_vector& x,
                                        const discrete_distribution& d);

/// Probability-weighted average of baseline_shapley over the support.
std::vector<double> mixed_baseline_shapley(const model& f,
                                           const feature_vector& x,
                                           const discrete_distribution& d);

/// Conditional-expectation Shapley over raw rows with tau-of-sigma
/// agreement; the explicand joins as a unit-weight row unless some row
/// already agrees with it everywhere.
std::vector<double> empirical_conditional_shapley(const model& f,
                                                  const feature_vector& x,
                                                  const dataset& data,
                                                  double tau);

/// Shapley over the game whose players are m equal subdivisions of each
/// feature's baseline-to-explicand change; n*m is capped at 10 players.
std::vector<double> micro_grid_shapley(const model& f, const feature_vector& x,
                                       const feature_vector& baseline,
                                       std::size_t m);

}  // namespace shapkit::oracle

#endif  // SHAPKIT_ORACLE_HPP
