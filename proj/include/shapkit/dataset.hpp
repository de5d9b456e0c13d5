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

#ifndef SHAPKIT_DATASET_HPP
#define SHAPKIT_DATASET_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "shapkit/feature_vector.hpp"

namespace shapkit {

/// Per-feature closeness rule for row agreement. tau == 0 means bit-exact
/// equality; tau > 0 admits rows within tau * sigma of the reference value,
/// where sigma is the weighted population standard deviation of the feature.
struct agreement_tolerance {
  double tau = 0.0;

  static agreement_tolerance exact() { return {0.0}; }
  static agreement_tolerance within_sigma(double tau);
};

/// Column-named table of example rows with optional positive row weights.
/// Immutable after construction.
class dataset {
 public:
  dataset(std::vector<std::string> feature_names, std::vector<std::vector<double>> rows,
          std::optional<std::vector<double>> weights = std::nullopt);

  static dataset from_rows(const std::vector<feature_vector>& rows,
                           std::optional<std::vector<double>> weights = std::nullopt);

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::vector<double>>& raw_rows() const { return rows_; }

  feature_vector row(std::size_t i) const;
  double weight(std::size_t i) const;
  double total_weight() const { return total_weight_; }
  bool has_weights() const { return weights_.has_value(); }

  /// Weighted population standard deviation of one column.
  double feature_std(const std::string& name) const;

  /// Copy with one row appended.
  dataset with_row(const feature_vector& extra, double weight = 1.0) const;

  /// Indices of rows agreeing with x on every member of S, in row order.
  /// S = empty set matches every row.
  std::vector<std::size_t> agreeing_rows(const feature_vector& x, const feature_subset& S,
                                         const agreement_tolerance& tol) const;

  /// Sub-dataset of the agreeing rows (weights carried over).
  dataset restrict_agreement(const feature_vector& x, const feature_subset& S,
                             const agreement_tolerance& tol) const;

 private:
  std::size_t column_index(const std::string& name) const;

  std::vector<std::string> feature_names_;
  std::vector<std::vector<double>> rows_;
  std::optional<std::vector<double>> weights_;
  double total_weight_ = 0.0;
};

}  // namespace shapkit

#endif  // SHAPKIT_DATASET_HPP
