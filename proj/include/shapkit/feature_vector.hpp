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

#ifndef SHAPKIT_FEATURE_VECTOR_HPP
#define SHAPKIT_FEATURE_VECTOR_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shapkit/errors.hpp"

namespace shapkit {

/// A named real-valued input point. Feature names are unique and keep the
/// order they were inserted with; that order is stable for the lifetime of
/// the object and everything derived from it.
class feature_vector {
 public:
  feature_vector() = default;
  feature_vector(std::initializer_list<std::pair<std::string, double>> entries);
  feature_vector(std::vector<std::string> names, std::vector<double> values);

  void set(const std::string& name, double value);

  /// Value of `name`; throws missing_feature_error when absent.
  double get(const std::string& name) const;
  std::optional<double> maybe_get(const std::string& name) const;
  bool has(const std::string& name) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  /// Copy with one coordinate replaced (the coordinate must exist).
  feature_vector with(const std::string& name, double value) const;

  bool operator==(const feature_vector& other) const;
  bool operator!=(const feature_vector& other) const { return !(*this == other); }

  /// True when both vectors define the same feature set (any order).
  bool same_features(const feature_vector& other) const;

  std::string to_string() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

/// Subset of a fixed, ordered feature universe, stored as a bit mask over
/// universe indices. Bit i set means universe[i] is a member.
class feature_subset {
 public:
  feature_subset() = default;
  feature_subset(std::vector<std::string> universe, std::uint64_t mask);
  feature_subset(std::vector<std::string> universe, const std::vector<std::string>& members);

  static feature_subset empty_set(std::vector<std::string> universe);
  static feature_subset full_set(std::vector<std::string> universe);

  const std::vector<std::string>& universe() const { return universe_; }
  std::uint64_t mask() const { return mask_; }
  bool contains(std::size_t index) const { return (mask_ >> index) & 1u; }
  bool contains(const std::string& name) const;
  std::size_t count() const;

  std::vector<std::string> members() const;
  feature_subset with_index(std::size_t index) const;
  feature_subset without_index(std::size_t index) const;
  bool subset_of(const feature_subset& other) const;

  std::string to_string() const;

 private:
  std::vector<std::string> universe_;
  std::uint64_t mask_ = 0;
};

/// Mixed vector x_S ; x'_{N\S}: explicand coordinates on S, baseline off S.
/// The universe is x's feature order; x and x' must define the same features.
feature_vector compose_mixed(const feature_vector& x, const feature_vector& baseline,
                             const std::vector<std::string>& universe, std::uint64_t mask);

}  // namespace shapkit

#endif  // SHAPKIT_FEATURE_VECTOR_HPP
