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

#ifndef SHAPKIT_PMS_HPP
#define SHAPKIT_PMS_HPP

#include <functional>
#include <string>
#include <vector>

#include "shapkit/expression.hpp"
#include "shapkit/feature_vector.hpp"
#include "shapkit/model.hpp"
#include "shapkit/set_function.hpp"
#include "shapkit/shapley.hpp"

namespace shapkit {

/// Declares which feature vectors describe states that can actually occur.
/// Mixed explicand/baseline vectors that the rule rejects give the coalition
/// game an impossible value instead of a real one.
class possibility_predicate {
 public:
  /// Every vector is possible.
  static possibility_predicate always_possible();

  /// Possible iff the boolean expression evaluates to a nonzero value.
  static possibility_predicate from_expression(expr_ptr rule);
  static possibility_predicate from_expression(const std::string& rule_text);

  /// Possible iff the vector matches one of the rows bit for bit on the
  /// row's own features. Rows must be nonempty.
  static possibility_predicate from_allowed_rows(std::vector<feature_vector> rows);

  bool operator()(const feature_vector& v) const { return rule_(v); }

  const std::string& describe() const { return description_; }

 private:
  possibility_predicate(std::function<bool(const feature_vector&)> rule,
                        std::string description);

  std::function<bool(const feature_vector&)> rule_;
  std::string description_;
};

/// Coalition game v(S) = f(x_S; x'_{N\S}) that is impossible exactly where
/// the predicate rejects the mixed vector. Both endpoints must be possible;
/// a rejected explicand or baseline is a precondition_error.
set_function pms_game(const model_ptr& f, const feature_vector& x,
                      const feature_vector& baseline,
                      const possibility_predicate& poss);

/// Permutation Shapley value that tolerates impossible coalitions. Features
/// whose mixed vector is impossible stay pending until a later feature makes
/// the coalition possible again; the accumulated marginal then goes wholly
/// to the unblocking feature when it was never blocked, and otherwise half
/// to the unblocking feature and half to the first pending one. Scores sum
/// to v(N) - v(empty) exactly. Enumerates all |N|! permutations for |N| <= 8,
/// samples sampling.n_perms permutations beyond that.
attribution possible_marginals_shapley(const set_function& game,
                                       const sampling_options& sampling = {});

attribution pms(const model_ptr& f, const feature_vector& x,
                const feature_vector& baseline,
                const possibility_predicate& poss,
                const sampling_options& sampling = {});

/// Marginal of the block Z on top of S, estimated through impossible
/// regions: both ends possible gives v(S+Z) - v(S); both impossible gives 0;
/// an impossible lower end averages over shrinking S and halves; an
/// impossible upper end averages over growing Z and halves. Memoized on
/// (S, Z); universes above 12 features are refused.
double estimate_marginal(const set_function& game, const feature_subset& s,
                         const feature_subset& z);

/// Total extension v' of a partial game: possible coalitions keep their
/// value; impossible ones, visited smallest to largest, get the mean of
/// v'(S\i) over their members. The empty coalition must be possible.
set_function completed_set_function(const set_function& game);

/// Side-by-side comparison of possible_marginals_shapley(v) against
/// shapley_exact(completed_set_function(v)). Reported, never enforced: the
/// two disagree on some games.
struct completion_report {
  bool agreed = true;
  double max_deviation = 0.0;
  std::vector<std::string> features;
  std::vector<double> pms_scores;
  std::vector<double> completed_scores;
  std::string witness;
};

completion_report compare_with_completion(const set_function& game,
                                          double tol = 1e-9);

}  // namespace shapkit

#endif  // SHAPKIT_PMS_HPP
