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

#include "shapkit/dataset.hpp"

#include <cmath>
#include <set>

#include "shapkit/errors.hpp"

namespace shapkit {

agreement_tolerance agreement_tolerance::within_sigma(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw argument_error("agreement tolerance must be a finite nonnegative fraction");
  }
  return {tau};
}

dataset::dataset(std::vector<std::string> feature_names, std::vector<std::vector<double>> rows,
                 std::optional<std::vector<double>> weights)
    : feature_names_(std::move(feature_names)),
      rows_(std::move(rows)),
      weights_(std::move(weights)) {
  if (feature_names_.empty()) throw argument_error("dataset needs at least one feature");
  std::set<std::string> seen;
  for (const auto& n : feature_names_) {
    if (!seen.insert(n).second) throw argument_error("duplicate dataset column: " + n);
  }
  for (const auto& r : rows_) {
    if (r.size() != feature_names_.size()) {
      throw argument_error("dataset row width does not match the header");
    }
    for (double v : r) {
      if (!std::isfinite(v)) throw argument_error("dataset cell is not finite");
    }
  }
  if (weights_) {
    if (weights_->size() != rows_.size()) {
      throw argument_error("dataset weight count does not match the row count");
    }
    total_weight_ = 0.0;
    for (double w : *weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw argument_error("dataset weights must be finite and nonnegative");
      }
      total_weight_ += w;
    }
    if (!rows_.empty() && !(total_weight_ > 0.0)) {
      throw argument_error("dataset weights sum to zero");
    }
  } else {
    total_weight_ = static_cast<double>(rows_.size());
  }
}

dataset dataset::from_rows(const std::vector<feature_vector>& rows,
                           std::optional<std::vector<double>> weights) {
  if (rows.empty()) throw argument_error("from_rows needs at least one row for the header");
  std::vector<std::string> names = rows[0].names();
  std::vector<std::vector<double>> values;
  values.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.same_features(rows[0])) {
      throw argument_error("dataset rows disagree on feature names");
    }
    std::vector<double> rv;
    rv.reserve(names.size());
    for (const auto& n : names) rv.push_back(r.get(n));
    values.push_back(std::move(rv));
  }
  return dataset(std::move(names), std::move(values), std::move(weights));
}

std::size_t dataset::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    if (feature_names_[i] == name) return i;
  }
  throw missing_feature_error(name);
}

feature_vector dataset::row(std::size_t i) const {
  if (i >= rows_.size()) throw argument_error("dataset row index out of range");
  return feature_vector(feature_names_, rows_[i]);
}

double dataset::weight(std::size_t i) const {
  if (i >= rows_.size()) throw argument_error("dataset row index out of range");
  return weights_ ? (*weights_)[i] : 1.0;
}

double dataset::feature_std(const std::string& name) const {
  if (rows_.empty()) throw precondition_error("feature_std needs a nonempty dataset");
  const std::size_t col = column_index(name);
  double mean = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) mean += weight(i) * rows_[i][col];
  mean /= total_weight_;
  double var = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double d = rows_[i][col] - mean;
    var += weight(i) * d * d;
  }
  var /= total_weight_;
  return std::sqrt(std::max(var, 0.0));
}

dataset dataset::with_row(const feature_vector& extra, double w) const {
  std::vector<std::vector<double>> rows = rows_;
  std::vector<double> rv;
  rv.reserve(feature_names_.size());
  for (const auto& n : feature_names_) rv.push_back(extra.get(n));
  rows.push_back(std::move(rv));
  std::optional<std::vector<double>> weights;
  if (weights_) {
    weights = *weights_;
    weights->push_back(w);
  } else if (w != 1.0) {
    weights = std::vector<double>(rows_.size(), 1.0);
    weights->push_back(w);
  }
  return dataset(feature_names_, std::move(rows), std::move(weights));
}

std::vector<std::size_t> dataset::agreeing_rows(const feature_vector& x, const feature_subset& S,
                                                const agreement_tolerance& tol) const {
  const auto members = S.members();
  std::vector<std::size_t> cols;
  std::vector<double> targets;
  std::vector<double> slack;
  cols.reserve(members.size());
  for (const auto& name : members) {
    cols.push_back(column_index(name));
    targets.push_back(x.get(name));
    slack.push_back(tol.tau > 0.0 ? tol.tau * feature_std(name) : 0.0);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double cell = rows_[i][cols[k]];
      if (tol.tau > 0.0) {
        if (std::abs(cell - targets[k]) > slack[k]) {
          ok = false;
          break;
        }
      } else if (cell != targets[k]) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

dataset dataset::restrict_agreement(const feature_vector& x, const feature_subset& S,
                                    const agreement_tolerance& tol) const {
  const auto idx = agreeing_rows(x, S, tol);
  std::vector<std::vector<double>> rows;
  rows.reserve(idx.size());
  std::optional<std::vector<double>> weights;
  if (weights_) weights = std::vector<double>();
  for (std::size_t i : idx) {
    rows.push_back(rows_[i]);
    if (weights) weights->push_back((*weights_)[i]);
  }
  return dataset(feature_names_, std::move(rows), std::move(weights));
}

}  // namespace shapkit
