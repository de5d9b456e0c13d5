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

#include "shapkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shapkit/errors.hpp"

namespace shapkit {

double model::analytic_partial(const feature_vector&, const std::string&) const {
  throw capability_error("model variant does not provide analytic derivatives");
}

linear_model::linear_model(double intercept,
                           std::vector<std::pair<std::string, double>> coefficients)
    : intercept_(intercept), coefficients_(std::move(coefficients)) {
  std::set<std::string> seen;
  for (const auto& [name, coef] : coefficients_) {
    if (!seen.insert(name).second) {
      throw argument_error("duplicate coefficient for feature: " + name);
    }
    if (!std::isfinite(coef)) {
      throw argument_error("non-finite coefficient for feature: " + name);
    }
  }
  if (!std::isfinite(intercept_)) throw argument_error("non-finite intercept");
}

double linear_model::eval(const feature_vector& x) const {
  double acc = intercept_;
  for (const auto& [name, coef] : coefficients_) acc += coef * x.get(name);
  return acc;
}

double linear_model::analytic_partial(const feature_vector&, const std::string& feature) const {
  return coefficient(feature);
}

double linear_model::coefficient(const std::string& feature) const {
  for (const auto& [name, coef] : coefficients_) {
    if (name == feature) return coef;
  }
  return 0.0;
}

std::vector<std::string> linear_model::referenced_features() const {
  std::vector<std::string> names;
  names.reserve(coefficients_.size());
  for (const auto& [name, coef] : coefficients_) names.push_back(name);
  return names;
}

expression_model::expression_model(expr_ptr root,
                                   std::optional<std::vector<std::string>> features)
    : root_(std::move(root)) {
  if (!root_) throw argument_error("expression model requires a non-null expression");
  std::set<std::string> vars;
  root_->collect_variables(vars);
  if (features) {
    features_ = std::move(*features);
    for (const auto& v : vars) {
      if (std::find(features_.begin(), features_.end(), v) == features_.end()) {
        throw argument_error("expression references undeclared feature: " + v);
      }
    }
  } else {
    features_.assign(vars.begin(), vars.end());
  }
  partials_.reserve(features_.size());
  for (const auto& f : features_) partials_.emplace_back(f, root_->derivative(f));
}

expression_model::expression_model(const std::string& source,
                                   std::optional<std::vector<std::string>> features)
    : expression_model(parse_expression(source), std::move(features)) {}

double expression_model::eval(const feature_vector& x) const { return root_->eval(x); }

double expression_model::analytic_partial(const feature_vector& x,
                                          const std::string& feature) const {
  for (const auto& [name, d] : partials_) {
    if (name == feature) return d->eval(x);
  }
  return 0.0;
}

std::vector<std::string> expression_model::referenced_features() const { return features_; }

namespace {

void validate_tree(const decision_tree& tree) {
  if (tree.nodes.empty()) throw argument_error("decision tree has no nodes");
  if (!(tree.weight > 0.0) || !std::isfinite(tree.weight)) {
    throw argument_error("decision tree weight must be positive and finite");
  }
  std::vector<bool> visited(tree.nodes.size(), false);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t idx = stack.back();
    stack.pop_back();
    if (idx >= tree.nodes.size()) {
      throw argument_error("decision tree child index out of range");
    }
    if (visited[idx]) throw argument_error("decision tree node reached twice");
    visited[idx] = true;
    const tree_node& node = tree.nodes[idx];
    if (!node.feature.empty()) {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
}

}  // namespace

tree_ensemble_model::tree_ensemble_model(std::vector<decision_tree> trees)
    : trees_(std::move(trees)) {
  if (trees_.empty()) throw argument_error("tree ensemble has no trees");
  std::set<std::string> seen;
  for (const auto& tree : trees_) {
    validate_tree(tree);
    for (const auto& node : tree.nodes) {
      if (!node.feature.empty() && seen.insert(node.feature).second) {
        features_.push_back(node.feature);
      }
    }
  }
}

double tree_ensemble_model::eval(const feature_vector& x) const {
  double total = 0.0;
  double weight = 0.0;
  for (const auto& tree : trees_) {
    std::size_t idx = 0;
    for (;;) {
      const tree_node& node = tree.nodes[idx];
      if (node.feature.empty()) {
        total += tree.weight * node.value;
        break;
      }
      idx = x.get(node.feature) < node.threshold ? node.left : node.right;
    }
    weight += tree.weight;
  }
  return total / weight;
}

std::vector<std::string> tree_ensemble_model::referenced_features() const { return features_; }

lookup_table_model::lookup_table_model(std::vector<std::pair<feature_vector, double>> rows,
                                       std::optional<double> default_value)
    : rows_(std::move(rows)), default_value_(default_value) {
  if (rows_.empty()) throw argument_error("lookup table has no rows");
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (!rows_[i].first.same_features(rows_[0].first)) {
      throw argument_error("lookup table rows disagree on feature names");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rows_[i].first == rows_[j].first) {
        throw argument_error("lookup table has duplicate key rows");
      }
    }
  }
}

double lookup_table_model::eval(const feature_vector& x) const {
  for (const auto& [key, value] : rows_) {
    bool match = true;
    for (const auto& name : key.names()) {
      if (x.get(name) != key.get(name)) {
        match = false;
        break;
      }
    }
    if (match) return value;
  }
  if (default_value_) return *default_value_;
  throw lookup_error("input matches no lookup table row and no default is set");
}

std::vector<std::string> lookup_table_model::referenced_features() const {
  return rows_[0].first.names();
}

sum_model::sum_model(std::vector<std::pair<double, model_ptr>> children)
    : children_(std::move(children)) {
  if (children_.empty()) throw argument_error("sum model has no children");
  for (const auto& [w, child] : children_) {
    if (!child) throw argument_error("sum model has a null child");
    if (!std::isfinite(w)) throw argument_error("sum model weight is not finite");
  }
}

double sum_model::eval(const feature_vector& x) const {
  double acc = 0.0;
  for (const auto& [w, child] : children_) acc += w * child->eval(x);
  return acc;
}

std::vector<std::string> sum_model::referenced_features() const {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& [w, child] : children_) {
    for (const auto& f : child->referenced_features()) {
      if (seen.insert(f).second) names.push_back(f);
    }
  }
  return names;
}

affine_reparam_model::affine_reparam_model(model_ptr child, std::string feature, double scale,
                                           double shift)
    : child_(std::move(child)), feature_(std::move(feature)), scale_(scale), shift_(shift) {
  if (!child_) throw argument_error("affine reparam requires a child model");
  if (scale_ == 0.0 || !std::isfinite(scale_) || !std::isfinite(shift_)) {
    throw argument_error("affine reparam requires finite scale != 0 and finite shift");
  }
}

double affine_reparam_model::eval(const feature_vector& x) const {
  feature_vector inner = x;
  inner.set(feature_, (x.get(feature_) - shift_) / scale_);
  return child_->eval(inner);
}

std::vector<std::string> affine_reparam_model::referenced_features() const {
  return child_->referenced_features();
}

layered_model::layered_model(model_ptr outer,
                             std::vector<std::pair<std::string, model_ptr>> inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
  if (!outer_) throw argument_error("layered model requires an outer model");
  if (inner_.empty()) throw argument_error("layered model has no intermediate nodes");
  std::set<std::string> node_names;
  for (const auto& [name, m] : inner_) {
    if (!m) throw argument_error("layered model node '" + name + "' has no model");
    if (!node_names.insert(name).second) {
      throw argument_error("duplicate intermediate node name: " + name);
    }
  }
}

feature_vector layered_model::intermediate_values(const feature_vector& x) const {
  // Inner nodes first, then base features the outer model reads directly.
  feature_vector mid;
  for (const auto& [name, m] : inner_) mid.set(name, m->eval(x));
  for (const auto& name : outer_->referenced_features()) {
    if (!mid.has(name)) mid.set(name, x.get(name));
  }
  return mid;
}

double layered_model::eval(const feature_vector& x) const {
  return outer_->eval(intermediate_values(x));
}

std::vector<std::string> layered_model::referenced_features() const {
  std::vector<std::string> names;
  std::set<std::string> seen;
  std::set<std::string> nodes;
  for (const auto& [node, m] : inner_) nodes.insert(node);
  for (const auto& [node, m] : inner_) {
    for (const auto& f : m->referenced_features()) {
      if (seen.insert(f).second) names.push_back(f);
    }
  }
  for (const auto& f : outer_->referenced_features()) {
    if (!nodes.count(f) && seen.insert(f).second) names.push_back(f);
  }
  return names;
}

double eval_model(const model& m, const feature_vector& x) { return m.eval(x); }

double partial_derivative(const model& m, const feature_vector& x, const std::string& feature,
                          derivative_mode mode, double h) {
  if (mode == derivative_mode::analytic) {
    if (!m.has_analytic_gradient()) {
      throw capability_error("analytic derivative requested on a model without one");
    }
    return m.analytic_partial(x, feature);
  }
  if (!(h > 0.0)) throw argument_error("central difference step must be positive");
  const double xi = x.get(feature);
  const double step = h * std::max(1.0, std::abs(xi));
  feature_vector lo = x;
  feature_vector hi = x;
  lo.set(feature, xi - step);
  hi.set(feature, xi + step);
  return (m.eval(hi) - m.eval(lo)) / (2.0 * step);
}

}  // namespace shapkit
