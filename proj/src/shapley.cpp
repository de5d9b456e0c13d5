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

#include "shapkit/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "shapkit/errors.hpp"
#include "shapkit/rng.hpp"

namespace shapkit {

double attribution::score(const std::string& feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == feature) return scores[i];
  }
  throw missing_feature_error(feature);
}

double attribution::sum() const {
  return std::accumulate(scores.begin(), scores.end(), 0.0);
}

double shapley_subset_weight(std::size_t subset_size, std::size_t n) {
  if (n == 0 || subset_size >= n) {
    throw argument_error("subset weight needs 0 <= |S| < n");
  }
  if (n <= 18) {
    // |S|! (n-|S|-1)! / n! fits comfortably in a double up to 18!.
    double num = 1.0;
    for (std::size_t k = 2; k <= subset_size; ++k) num *= static_cast<double>(k);
    for (std::size_t k = 2; k <= n - subset_size - 1; ++k) num *= static_cast<double>(k);
    double den = 1.0;
    for (std::size_t k = 2; k <= n; ++k) den *= static_cast<double>(k);
    return num / den;
  }
  const double s = static_cast<double>(subset_size);
  const double nn = static_cast<double>(n);
  return std::exp(std::lgamma(s + 1.0) + std::lgamma(nn - s) - std::lgamma(nn + 1.0));
}

attribution shapley_exact(const set_function& v, const engine_options& opts) {
  const std::size_t n = v.dimension();
  if (n > opts.exact_cap) {
    throw size_error("universe too large for exact enumeration");
  }
  std::vector<double> weights(n);
  for (std::size_t s = 0; s < n; ++s) weights[s] = shapley_subset_weight(s, n);

  attribution out;
  out.features = v.universe();
  out.scores.assign(n, 0.0);
  out.method = "shapley_exact";

  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 0; mask <= full; ++mask) {
    const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
    if (size == n) continue;
    const double base = v.value(mask);
    const double w = weights[size];
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      out.scores[i] += w * (v.value(mask | bit) - base);
    }
  }
  return out;
}

namespace {

void accumulate_permutation(const set_function& v, const std::vector<std::size_t>& perm,
                            std::vector<double>& acc) {
  std::uint64_t mask = 0;
  double prev = v.value(0);
  for (const std::size_t i : perm) {
    mask |= std::uint64_t{1} << i;
    const double cur = v.value(mask);
    acc[i] += cur - prev;
    prev = cur;
  }
}

}  // namespace

attribution shapley_sampled(const set_function& v, const sampling_options& opts) {
  const std::size_t n = v.dimension();
  attribution out;
  out.features = v.universe();
  out.scores.assign(n, 0.0);

  if (opts.enumerate_all) {
    if (n > 10) throw size_error("permutation enumeration is capped at 10 features");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::size_t count = 0;
    do {
      accumulate_permutation(v, perm, out.scores);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& s : out.scores) s /= static_cast<double>(count);
    out.method = "shapley_all_permutations";
    out.sample_count = count;
    return out;
  }

  if (opts.n_perms == 0) throw argument_error("sampling needs at least one permutation");
  std::vector<std::size_t> perm(n);
  for (std::size_t p = 0; p < opts.n_perms; ++p) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng_stream stream = rng_stream::derive(opts.seed, p);
    stream.shuffle(perm);
    accumulate_permutation(v, perm, out.scores);
  }
  for (double& s : out.scores) s /= static_cast<double>(opts.n_perms);
  out.method = "shapley_sampled";
  out.sample_count = opts.n_perms;
  out.seed = opts.seed;
  return out;
}

attribution fixed_permutation_marginals(const set_function& v,
                                        const std::vector<std::string>& order) {
  const auto& universe = v.universe();
  const std::size_t n = v.dimension();
  if (order.size() != n) throw argument_error("order must list every feature exactly once");
  std::vector<std::size_t> perm;
  perm.reserve(n);
  std::vector<bool> used(n, false);
  for (const auto& name : order) {
    const auto it = std::find(universe.begin(), universe.end(), name);
    if (it == universe.end()) throw argument_error("order names unknown feature: " + name);
    const std::size_t idx = static_cast<std::size_t>(it - universe.begin());
    if (used[idx]) throw argument_error("order repeats feature: " + name);
    used[idx] = true;
    perm.push_back(idx);
  }

  attribution out;
  out.features = universe;
  out.scores.assign(n, 0.0);
  out.method = "fixed_permutation_marginals";
  accumulate_permutation(v, perm, out.scores);
  return out;
}

}  // namespace shapkit
