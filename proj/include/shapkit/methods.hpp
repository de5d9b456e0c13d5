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

#ifndef SHAPKIT_METHODS_HPP
#define SHAPKIT_METHODS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapkit/dataset.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/feature_vector.hpp"
#include "shapkit/model.hpp"
#include "shapkit/set_function.hpp"
#include "shapkit/shapley.hpp"

namespace shapkit {

// ---------------------------------------------------------------------------
// Set-function builders. Each returns the coalition game a method takes the
// Shapley value of; the games are also consumed directly by the axiom
// checkers and the brute-force oracle.
// ---------------------------------------------------------------------------

/// v(S) = f(x_S; baseline on the rest). Universe is x's feature order.
set_function bshap_game(model_ptr f, const feature_vector& x, const feature_vector& baseline);

/// v(S) = average over baselines b ~ D of f(x_S; b on the rest).
set_function rbshap_game(model_ptr f, const feature_vector& x, const discrete_distribution& D);

/// v(S) = E_D[f | w_S = x_S], exact over the support.
set_function ces_game(model_ptr f, const feature_vector& x, const discrete_distribution& D);

/// Algorithm over the raw rows: v(S) = weighted mean of f over the rows
/// agreeing with x on S within tau sigma per feature (tau = 0: bit-exact).
/// The explicand is appended as a unit-weight row unless some row already
/// agrees with it on every feature; sigma comes from the input rows, so the
/// appended explicand does not shift it.
set_function ces_empirical_game(model_ptr f, const feature_vector& x, const dataset& data,
                                double tau, bool append_explicand = true);

// ---------------------------------------------------------------------------
// Attribution methods.
// ---------------------------------------------------------------------------

attribution bshap(const model_ptr& f, const feature_vector& x, const feature_vector& baseline,
                  const engine_options& opts = {});

attribution rbshap(const model_ptr& f, const feature_vector& x, const discrete_distribution& D,
                   const engine_options& opts = {});

/// RBShap with n_baselines baselines drawn from D instead of the full
/// support; deterministic for a given seed.
attribution rbshap_sampled(const model_ptr& f, const feature_vector& x,
                           const discrete_distribution& D, std::size_t n_baselines,
                           std::uint64_t seed, const engine_options& opts = {});

attribution ces(const model_ptr& f, const feature_vector& x, const discrete_distribution& D,
                const engine_options& opts = {});

attribution ces_empirical(const model_ptr& f, const feature_vector& x, const dataset& data,
                          double tau, const engine_options& opts = {},
                          bool append_explicand = true);

struct ig_options {
  std::size_t steps = 300;
  derivative_mode gradient = derivative_mode::analytic;
  double fd_step = 1e-6;
};

/// Midpoint-rule path integral of gradients along the straight line from
/// the baseline to the explicand.
attribution ig(const model_ptr& f, const feature_vector& x, const feature_vector& baseline,
               const ig_options& opts = {});

struct micro_options {
  /// The exact path tabulates f on the (m+1)^n subdivision grid; refuse
  /// beyond this many grid points.
  std::size_t grid_cap = 4000000;
};

/// Shapley value of the game where every feature is split into m micro
/// features, each moving its coordinate by (x_i - x'_i)/m; micro scores are
/// summed back per original feature. Exact (deterministic) evaluation.
attribution micro_shapley(const model_ptr& f, const feature_vector& x,
                          const feature_vector& baseline, std::size_t m,
                          const micro_options& opts = {});

/// Same game estimated by sampling permutations of the n*m micro features.
attribution micro_shapley_sampled(const model_ptr& f, const feature_vector& x,
                                  const feature_vector& baseline, std::size_t m,
                                  std::size_t n_perms, std::uint64_t seed);

/// Outcome of rewriting (f, x, x') as a pair of nondecreasing games over a
/// zero baseline and a nonnegative explicand.
struct cost_sharing_reduction {
  model_ptr f1;
  model_ptr f2;
  feature_vector explicand;  // per-feature |x_i - x'_i|
  feature_vector baseline;   // all zeros
  double p = 0.0;            // lower bound on the partials used for f2
  std::vector<double> scale;  // +1 / -1 per feature, explicand order
  std::vector<double> shift;
};

struct reduction_options {
  std::size_t grid_points_per_axis = 33;
  std::size_t grid_cap = 5000000;
  double fd_step = 1e-6;
};

/// Per-feature sign flips make the change nonnegative; p bounds the partial
/// derivatives over the box from below (exact for linear models, a sampled
/// grid minimum with a 10 percent margin toward -inf otherwise); then
/// f2 = sum of (-p) x_i when p < 0 (zero otherwise) and f1 = flipped f + f2,
/// both nondecreasing on the box.
cost_sharing_reduction reduce_to_cost_sharing(const model_ptr& f, const feature_vector& x,
                                              const feature_vector& baseline,
                                              const reduction_options& opts = {});

/// Layer-by-layer attribution: Shapley on the outer model over intermediate
/// nodes, then each node's score pushed down proportionally to the absolute
/// inner scores with their signs kept (equal split when the inner vector is
/// all zero). Not efficient in general; that is the point of the exercise.
attribution compositional_bshap(const model_ptr& f, const feature_vector& x,
                                const feature_vector& baseline,
                                const engine_options& opts = {});

/// True when f never decreases along any axis between neighboring points of
/// a uniform grid over [lo, hi].
bool grid_nondecreasing(const model& f, const feature_vector& lo, const feature_vector& hi,
                        std::size_t points_per_axis = 9, double tol = 1e-9);

// ---------------------------------------------------------------------------
// One-stop request form used by the command line.
// ---------------------------------------------------------------------------

struct attribution_request {
  model_ptr f;
  feature_vector explicand;
  std::optional<feature_vector> baseline;
  std::optional<discrete_distribution> dist;
  std::optional<dataset> data;
  std::string method;  // bshap | rbshap | ces | ces_empirical | ig | micro
  engine_options engine;
  std::optional<sampling_options> sampling;
  ig_options ig;
  double smoothing_tau = 0.0;
  std::size_t micro_m = 1;
  bool append_explicand = true;
};

/// Validates that the request carries what the method needs, then runs it.
attribution run_attribution(const attribution_request& request);

}  // namespace shapkit

#endif  // SHAPKIT_METHODS_HPP
