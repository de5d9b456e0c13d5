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

#include "shapkit/pms.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "shapkit/errors.hpp"
#include "shapkit/rng.hpp"

namespace shapkit {

namespace {

constexpr std::size_t kExactPermutationCap = 8;
constexpr std::size_t kEstimateCap = 12;
constexpr std::size_t kCompletionCap = 20;

}  // namespace

possibility_predicate::possibility_predicate(
    std::function<bool(const feature_vector&)> rule, std::string description)
    : rule_(std::move(rule)), description_(std::move(description)) {}

possibility_predicate possibility_predicate::always_possible() {
  return possibility_predicate([](const feature_vector&) { return true; },
                               "always possible");
}

possibility_predicate possibility_predicate::from_expression(expr_ptr rule) {
  if (!rule) throw argument_error("possibility rule expression is null");
  std::string text = rule->text();
  return possibility_predicate(
      [rule = std::move(rule)](const feature_vector& v) {
        return rule->eval(v) != 0.0;
      },
      "expression: " + text);
}

possibility_predicate possibility_predicate::from_expression(
    const std::string& rule_text) {
  return from_expression(parse_expression(rule_text));
}

possibility_predicate possibility_predicate::from_allowed_rows(
    std::vector<feature_vector> rows) {
  if (rows.empty()) throw argument_error("allowed-row list is empty");
  auto shared = std::make_shared<std::vector<feature_vector>>(std::move(rows));
  std::string description =
      "allowed rows: " + std::to_string(shared->size()) + " rows";
  return possibility_predicate(
      [shared](const feature_vector& v) {
        for (const feature_vector& row : *shared) {
          bool match = true;
          for (const std::string& name : row.names()) {
            auto got = v.maybe_get(name);
            if (!got || *got != row.get(name)) {
              match = false;
              break;
            }
          }
          if (match) return true;
        }
        return false;
      },
      std::move(description));
}

set_function pms_game(const model_ptr& f, const feature_vector& x,
                      const feature_vector& baseline,
                      const possibility_predicate& poss) {
  if (!f) throw argument_error("model is null");
  if (!x.same_features(baseline))
    throw argument_error("explicand and baseline define different features");
  if (!poss(x))
    throw precondition_error("explicand is impossible under the predicate");
  if (!poss(baseline))
    throw precondition_error("baseline is impossible under the predicate");

  std::vector<std::string> universe = x.names();
  return set_function(
      universe,
      [f, x, baseline, poss, universe](const feature_subset& s)
          -> std::optional<double> {
        feature_vector mixed = compose_mixed(x, baseline, universe, s.mask());
        if (!poss(mixed)) return std::nullopt;
        return f->eval(mixed);
      });
}

namespace {

/// One permutation walk. Pending features accumulate until the coalition is
/// possible again; the flushed marginal goes wholly to the newest feature
/// when it is alone, else half to it and half to the oldest pending one.
void walk_permutation(const set_function& game,
                      const std::vector<std::size_t>& order,
                      std::vector<double>& scores) {
  std::uint64_t accepted = 0;
  double accepted_value = game.value(0);
  std::uint64_t pending_mask = 0;
  std::size_t first_pending = 0;
  std::size_t pending_count = 0;

  for (std::size_t idx : order) {
    if (pending_count == 0) first_pending = idx;
    pending_mask |= std::uint64_t{1} << idx;
    ++pending_count;

    std::optional<double> candidate = game.evaluate(accepted | pending_mask);
    if (!candidate) continue;

    double marginal = *candidate - accepted_value;
    if (pending_count == 1) {
      scores[idx] += marginal;
    } else {
      scores[idx] += marginal / 2.0;
      scores[first_pending] += marginal / 2.0;
    }
    accepted |= pending_mask;
    accepted_value = *candidate;
    pending_mask = 0;
    pending_count = 0;
  }

  // The grand coalition is possible, so nothing stays pending.
  assert(pending_count == 0);
}

}  // namespace

attribution possible_marginals_shapley(const set_function& game,
                                       const sampling_options& sampling) {
  const std::size_t n = game.dimension();
  if (!game.evaluate(0))
    throw precondition_error("empty coalition is impossible");
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0}
                                       : ((std::uint64_t{1} << n) - 1);
  if (!game.evaluate(full))
    throw precondition_error("grand coalition is impossible");

  attribution out;
  out.features = game.universe();
  out.scores.assign(n, 0.0);

  if (n <= kExactPermutationCap) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t count = 0;
    do {
      walk_permutation(game, order, out.scores);
      ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (double& s : out.scores) s /= static_cast<double>(count);
    out.method = "pms";
    out.sample_count = count;
    return out;
  }

  if (sampling.n_perms == 0) throw argument_error("n_perms must be positive");
  std::vector<std::size_t> order(n);
  for (std::size_t p = 0; p < sampling.n_perms; ++p) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng_stream stream = rng_stream::derive(sampling.seed, p);
    stream.shuffle(order);
    walk_permutation(game, order, out.scores);
  }
  for (double& s : out.scores) s /= static_cast<double>(sampling.n_perms);
  out.method = "pms_sampled";
  out.sample_count = sampling.n_perms;
  out.seed = sampling.seed;
  return out;
}

attribution pms(const model_ptr& f, const feature_vector& x,
                const feature_vector& baseline,
                const possibility_predicate& poss,
                const sampling_options& sampling) {
  set_function game = pms_game(f, x, baseline, poss);
  attribution out = possible_marginals_shapley(game, sampling);
  out.baseline_note = "baseline " + baseline.to_string();
  out.distribution_note = "possibility: " + poss.describe();
  return out;
}

namespace {

double estimate_marginal_impl(
    const set_function& game, std::uint64_t s_mask, std::uint64_t z_mask,
    std::unordered_map<std::uint64_t, double>& memo) {
  const std::uint64_t key = (s_mask << 16) | z_mask;
  auto found = memo.find(key);
  if (found != memo.end()) return found->second;

  const std::optional<double> lower = game.evaluate(s_mask);
  const std::optional<double> upper = game.evaluate(s_mask | z_mask);

  double result = 0.0;
  if (lower && upper) {
    result = *upper - *lower;
  } else if (!lower && !upper) {
    result = 0.0;
  } else if (!lower) {
    // Impossible base: average the estimate over one-smaller bases, halved.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < game.dimension(); ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (!(s_mask & bit)) continue;
      sum += estimate_marginal_impl(game, s_mask & ~bit, z_mask, memo);
      ++count;
    }
    assert(count > 0);  // s_mask == 0 is possible by precondition
    result = sum / static_cast<double>(count) / 2.0;
  } else {
    // Impossible top: average the estimate over one-larger blocks, halved.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < game.dimension(); ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((s_mask | z_mask) & bit) continue;
      sum += estimate_marginal_impl(game, s_mask, z_mask | bit, memo);
      ++count;
    }
    // The grand coalition is possible, so the block can always grow.
    assert(count > 0);
    result = sum / static_cast<double>(count) / 2.0;
  }

  memo.emplace(key, result);
  return result;
}

}  // namespace

double estimate_marginal(const set_function& game, const feature_subset& s,
                         const feature_subset& z) {
  const std::size_t n = game.dimension();
  if (n > kEstimateCap)
    throw size_error("estimate_marginal supports at most " +
                     std::to_string(kEstimateCap) + " features, got " +
                     std::to_string(n));
  if (s.mask() & z.mask())
    throw precondition_error("S and Z overlap: " + s.to_string() + " vs " +
                             z.to_string());
  if (!game.evaluate(0))
    throw precondition_error("empty coalition is impossible");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  if (!game.evaluate(full))
    throw precondition_error("grand coalition is impossible");

  std::unordered_map<std::uint64_t, double> memo;
  return estimate_marginal_impl(game, s.mask(), z.mask(), memo);
}

set_function completed_set_function(const set_function& game) {
  const std::size_t n = game.dimension();
  if (n > kCompletionCap)
    throw size_error("completed_set_function supports at most " +
                     std::to_string(kCompletionCap) + " features, got " +
                     std::to_string(n));
  if (!game.evaluate(0))
    throw precondition_error("empty coalition is impossible");

  const std::uint64_t size = std::uint64_t{1} << n;
  auto table = std::make_shared<std::vector<double>>(size, 0.0);

  std::vector<std::uint64_t> masks(size);
  std::iota(masks.begin(), masks.end(), std::uint64_t{0});
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint64_t a, std::uint64_t b) {
                     return std::popcount(a) < std::popcount(b);
                   });

  for (std::uint64_t mask : masks) {
    std::optional<double> direct = game.evaluate(mask);
    if (direct) {
      (*table)[mask] = *direct;
      continue;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (!(mask & bit)) continue;
      sum += (*table)[mask & ~bit];
      ++count;
    }
    (*table)[mask] = sum / static_cast<double>(count);
  }

  return set_function(game.universe(),
                      [table](const feature_subset& s) -> std::optional<double> {
                        return (*table)[s.mask()];
                      });
}

completion_report compare_with_completion(const set_function& game,
                                          double tol) {
  attribution direct = possible_marginals_shapley(game);
  attribution completed = shapley_exact(completed_set_function(game));

  completion_report report;
  report.features = game.universe();
  report.pms_scores = direct.scores;
  report.completed_scores = completed.scores;
  for (std::size_t i = 0; i < report.features.size(); ++i) {
    double dev = std::abs(direct.scores[i] - completed.scores[i]);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol && report.agreed) {
      report.agreed = false;
      std::ostringstream oss;
      oss << "feature " << report.features[i] << ": pms " << direct.scores[i]
          << " vs completed " << completed.scores[i];
      report.witness = oss.str();
    }
  }
  return report;
}

}  // namespace shapkit
