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

#ifndef SHAPKIT_SET_FUNCTION_HPP
#define SHAPKIT_SET_FUNCTION_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shapkit/feature_vector.hpp"

namespace shapkit {

/// Coalition game v over subsets of an ordered feature universe. The
/// evaluator may return nullopt, which marks the coalition as impossible;
/// ordinary games always return a value. Evaluations are memoized behind a
/// mutex, so a set_function may be shared across threads.
class set_function {
 public:
  using evaluator = std::function<std::optional<double>(const feature_subset&)>;

  set_function(std::vector<std::string> universe, evaluator fn);

  /// Convenience wrapper for games that never produce an impossible value.
  static set_function total(std::vector<std::string> universe,
                            std::function<double(const feature_subset&)> fn);

  const std::vector<std::string>& universe() const { return universe_; }
  std::size_t dimension() const { return universe_.size(); }

  std::optional<double> evaluate(std::uint64_t mask) const;
  std::optional<double> evaluate(const feature_subset& s) const;

  /// Value of the coalition; throws invalid_set_function_error on an
  /// impossible coalition.
  double value(std::uint64_t mask) const;

  double empty_value() const { return value(0); }
  double grand_value() const;

 private:
  std::vector<std::string> universe_;
  evaluator fn_;
  mutable std::mutex memo_mutex_;
  mutable std::unordered_map<std::uint64_t, std::optional<double>> memo_;
};

}  // namespace shapkit

#endif  // SHAPKIT_SET_FUNCTION_HPP
