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

#include "shapkit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shapkit/errors.hpp"

namespace shapkit {

namespace {

constexpr double mass_tolerance = 1e-12;

void validate_marginal(const feature_marginal& m) {
  if (m.atoms.empty()) {
    throw argument_error("marginal for '" + m.feature + "' has no atoms");
  }
  double total = 0.0;
  std::set<double> seen;
  for (const auto& [value, prob] : m.atoms) {
    if (!std::isfinite(value)) {
      throw argument_error("marginal value for '" + m.feature + "' is not finite");
    }
    if (!(prob >= 0.0) || !std::isfinite(prob)) {
      throw argument_error("marginal probability for '" + m.feature + "' is invalid");
    }
    if (!seen.insert(value).second) {
      throw argument_error("marginal for '" + m.feature + "' repeats a value");
    }
    total += prob;
  }
  if (std::abs(total - 1.0) > mass_tolerance) {
    throw argument_error("marginal for '" + m.feature + "' does not sum to 1");
  }
}

}  // namespace

void discrete_distribution::validate_total_mass() const {
  if (probs_.empty()) throw argument_error("distribution has empty support");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw argument_error("distribution probability is invalid");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > mass_tolerance) {
    throw argument_error("distribution probabilities do not sum to 1");
  }
}

discrete_distribution discrete_distribution::from_atoms(
    std::vector<std::pair<feature_vector, double>> atoms) {
  if (atoms.empty()) throw argument_error("distribution has empty support");
  discrete_distribution d;
  d.kind_ = distribution_kind::explicit_atoms;
  d.feature_names_ = atoms[0].first.names();
  for (const auto& [point, prob] : atoms) {
    if (!point.same_features(atoms[0].first)) {
      throw argument_error("distribution atoms disagree on feature names");
    }
    std::vector<double> row;
    row.reserve(d.feature_names_.size());
    for (const auto& n : d.feature_names_) row.push_back(point.get(n));
    d.values_.push_back(std::move(row));
    d.probs_.push_back(prob);
  }
  d.validate_total_mass();
  return d;
}

discrete_distribution discrete_distribution::empirical(const dataset& data) {
  if (data.row_count() == 0) throw argument_error("empirical distribution needs rows");
  discrete_distribution d;
  d.kind_ = distribution_kind::empirical;
  d.feature_names_ = data.feature_names();
  for (std::size_t i = 0; i < data.row_count(); ++i) {
    const auto& row = data.raw_rows()[i];
    const double w = data.weight(i);
    if (w == 0.0) continue;
    bool merged = false;
    for (std::size_t j = 0; j < d.values_.size(); ++j) {
      if (d.values_[j] == row) {
        d.probs_[j] += w;
        merged = true;
        break;
      }
    }
    if (!merged) {
      d.values_.push_back(row);
      d.probs_.push_back(w);
    }
  }
  for (double& p : d.probs_) p /= data.total_weight();
  d.validate_total_mass();
  return d;
}

discrete_distribution discrete_distribution::independent(std::vector<feature_marginal> marginals,
                                                         std::size_t materialization_cap) {
  if (marginals.empty()) throw argument_error("independent distribution needs marginals");
  std::set<std::string> seen;
  std::size_t joint = 1;
  for (const auto& m : marginals) {
    validate_marginal(m);
    if (!seen.insert(m.feature).second) {
      throw argument_error("duplicate marginal for feature: " + m.feature);
    }
    if (joint > materialization_cap / m.atoms.size()) {
      throw size_error("independent joint support exceeds the materialization cap");
    }
    joint *= m.atoms.size();
  }
  discrete_distribution d;
  d.kind_ = distribution_kind::independent;
  for (const auto& m : marginals) d.feature_names_.push_back(m.feature);
  std::vector<std::size_t> odo(marginals.size(), 0);
  for (;;) {
    std::vector<double> row;
    row.reserve(marginals.size());
    double p = 1.0;
    for (std::size_t k = 0; k < marginals.size(); ++k) {
      row.push_back(marginals[k].atoms[odo[k]].first);
      p *= marginals[k].atoms[odo[k]].second;
    }
    d.values_.push_back(std::move(row));
    d.probs_.push_back(p);
    std::size_t k = marginals.size();
    while (k > 0) {
      --k;
      if (++odo[k] < marginals[k].atoms.size()) break;
      odo[k] = 0;
      if (k == 0) {
        d.marginals_ = std::move(marginals);
        d.validate_total_mass();
        return d;
      }
    }
  }
}

discrete_distribution discrete_distribution::product_of_marginals(
    const discrete_distribution& src, std::size_t materialization_cap) {
  auto result = independent(src.marginals(), materialization_cap);
  result.kind_ = distribution_kind::product_of_marginals;
  return result;
}

discrete_distribution discrete_distribution::two_point_epsilon(const feature_vector& x,
                                                               const feature_vector& baseline,
                                                               double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw argument_error("two-point epsilon must lie strictly between 0 and 1");
  }
  if (!x.same_features(baseline)) {
    throw argument_error("explicand and baseline must share a feature set");
  }
  std::vector<feature_marginal> marginals;
  for (const auto& name : x.names()) {
    feature_marginal m;
    m.feature = name;
    const double xv = x.get(name);
    const double bv = baseline.get(name);
    if (xv == bv) {
      m.atoms = {{xv, 1.0}};
    } else {
      m.atoms = {{xv, eps}, {bv, 1.0 - eps}};
    }
    marginals.push_back(std::move(m));
  }
  auto result = independent(std::move(marginals));
  result.kind_ = distribution_kind::two_point_epsilon;
  return result;
}

feature_vector discrete_distribution::atom(std::size_t i) const {
  if (i >= values_.size()) throw argument_error("distribution atom index out of range");
  return feature_vector(feature_names_, values_[i]);
}

std::vector<feature_marginal> discrete_distribution::marginals() const {
  if (!marginals_.empty()) return marginals_;
  std::vector<feature_marginal> out;
  out.reserve(feature_names_.size());
  for (std::size_t col = 0; col < feature_names_.size(); ++col) {
    feature_marginal m;
    m.feature = feature_names_[col];
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i][col];
      bool merged = false;
      for (auto& [value, prob] : m.atoms) {
        if (value == v) {
          prob += probs_[i];
          merged = true;
          break;
        }
      }
      if (!merged) m.atoms.emplace_back(v, probs_[i]);
    }
    out.push_back(std::move(m));
  }
  return out;
}

bool discrete_distribution::is_independent_kind() const {
  return kind_ == distribution_kind::independent ||
         kind_ == distribution_kind::product_of_marginals ||
         kind_ == distribution_kind::two_point_epsilon;
}

double discrete_distribution::expectation(const model& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (probs_[i] == 0.0) continue;
    acc += probs_[i] * f.eval(atom(i));
  }
  return acc;
}

double discrete_distribution::conditional_expectation(const model& f, const feature_vector& x,
                                                      const feature_subset& S) const {
  const auto members = S.members();
  std::vector<std::size_t> cols;
  std::vector<double> targets;
  cols.reserve(members.size());
  for (const auto& name : members) {
    const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
    if (it == feature_names_.end()) throw missing_feature_error(name);
    cols.push_back(static_cast<std::size_t>(it - feature_names_.begin()));
    targets.push_back(x.get(name));
  }
  double mass = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (probs_[i] == 0.0) continue;
    bool match = true;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (values_[i][cols[k]] != targets[k]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    mass += probs_[i];
    acc += probs_[i] * f.eval(atom(i));
  }
  if (!(mass > 0.0)) {
    throw conditioning_error("conditioning event has zero probability");
  }
  return acc / mass;
}

double discrete_distribution::conditional_expectation_marginalized(
    const model& f, const feature_vector& x, const feature_subset& S) const {
  if (!is_independent_kind()) {
    throw precondition_error("marginalized conditioning requires an independent distribution");
  }
  // Complement features keep their own marginals; members of S are pinned
  // to the explicand. Independence makes the conditional a plain product.
  std::vector<const feature_marginal*> free_marginals;
  feature_vector point;
  for (const auto& m : marginals_) {
    if (S.contains(m.feature)) {
      const double xv = x.get(m.feature);
      bool in_support = false;
      for (const auto& [value, prob] : m.atoms) {
        if (value == xv && prob > 0.0) in_support = true;
      }
      if (!in_support) {
        throw conditioning_error("conditioning event has zero probability");
      }
      point.set(m.feature, xv);
    } else {
      point.set(m.feature, m.atoms[0].first);
      free_marginals.push_back(&m);
    }
  }
  if (free_marginals.empty()) return f.eval(point);
  std::vector<std::size_t> odo(free_marginals.size(), 0);
  double acc = 0.0;
  for (;;) {
    double p = 1.0;
    for (std::size_t k = 0; k < free_marginals.size(); ++k) {
      const auto& [value, prob] = free_marginals[k]->atoms[odo[k]];
      point.set(free_marginals[k]->feature, value);
      p *= prob;
    }
    if (p > 0.0) acc += p * f.eval(point);
    std::size_t k = free_marginals.size();
    bool done = true;
    while (k > 0) {
      --k;
      if (++odo[k] < free_marginals[k]->atoms.size()) {
        done = false;
        break;
      }
      odo[k] = 0;
    }
    if (done) return acc;
  }
}

}  // namespace shapkit
