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

#ifndef SHAPKIT_MODEL_HPP
#define SHAPKIT_MODEL_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shapkit/expression.hpp"
#include "shapkit/feature_vector.hpp"

namespace shapkit {

/// Pure real-valued function over named features. Immutable after
/// construction; evaluation is reentrant.
class model {
 public:
  virtual ~model() = default;

  virtual double eval(const feature_vector& x) const = 0;

  /// Only the linear and expression families carry exact derivatives.
  virtual bool has_analytic_gradient() const { return false; }

  /// Exact d f / d feature at x. Throws capability_error unless
  /// has_analytic_gradient().
  virtual double analytic_partial(const feature_vector& x, const std::string& feature) const;

  /// Features the model reads, in a stable order.
  virtual std::vector<std::string> referenced_features() const = 0;
};

using model_ptr = std::shared_ptr<const model>;

class linear_model final : public model {
 public:
  linear_model(double intercept, std::vector<std::pair<std::string, double>> coefficients);

  double eval(const feature_vector& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double analytic_partial(const feature_vector& x, const std::string& feature) const override;
  std::vector<std::string> referenced_features() const override;

  double intercept() const { return intercept_; }
  const std::vector<std::pair<std::string, double>>& coefficients() const {
    return coefficients_;
  }
  double coefficient(const std::string& feature) const;

 private:
  double intercept_;
  std::vector<std::pair<std::string, double>> coefficients_;
};

class expression_model final : public model {
 public:
  /// Feature order defaults to the sorted variables of the expression.
  explicit expression_model(expr_ptr root,
                            std::optional<std::vector<std::string>> features = std::nullopt);
  explicit expression_model(const std::string& source,
                            std::optional<std::vector<std::string>> features = std::nullopt);

  double eval(const feature_vector& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double analytic_partial(const feature_vector& x, const std::string& feature) const override;
  std::vector<std::string> referenced_features() const override;

  const expr_ptr& root() const { return root_; }

 private:
  expr_ptr root_;
  std::vector<std::string> features_;
  std::vector<std::pair<std::string, expr_ptr>> partials_;  // precomputed, one per feature
};

struct tree_node {
  // Leaf when feature is empty; then value holds the prediction.
  std::string feature;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double value = 0.0;
};

struct decision_tree {
  std::vector<tree_node> nodes;  // root at index 0
  double weight = 1.0;
};

/// Weighted average of axis-aligned decision trees. Split rule: feature
/// value < threshold goes left, ties go right.
class tree_ensemble_model final : public model {
 public:
  explicit tree_ensemble_model(std::vector<decision_tree> trees);

  double eval(const feature_vector& x) const override;
  std::vector<std::string> referenced_features() const override;

 private:
  std::vector<decision_tree> trees_;
  std::vector<std::string> features_;
};

/// Bit-exact row lookup over the table's feature set.
class lookup_table_model final : public model {
 public:
  lookup_table_model(std::vector<std::pair<feature_vector, double>> rows,
                     std::optional<double> default_value = std::nullopt);

  double eval(const feature_vector& x) const override;
  std::vector<std::string> referenced_features() const override;

 private:
  std::vector<std::pair<feature_vector, double>> rows_;
  std::optional<double> default_value_;
};

class sum_model final : public model {
 public:
  explicit sum_model(std::vector<std::pair<double, model_ptr>> children);

  double eval(const feature_vector& x) const override;
  std::vector<std::string> referenced_features() const override;

  const std::vector<std::pair<double, model_ptr>>& children() const { return children_; }

 private:
  std::vector<std::pair<double, model_ptr>> children_;
};

/// Evaluates the child with feature i replaced by (x_i - d) / c.
class affine_reparam_model final : public model {
 public:
  affine_reparam_model(model_ptr child, std::string feature, double scale, double shift);

  double eval(const feature_vector& x) const override;
  std::vector<std::string> referenced_features() const override;

  const model_ptr& child() const { return child_; }
  const std::string& feature() const { return feature_; }
  double scale() const { return scale_; }
  double shift() const { return shift_; }

 private:
  model_ptr child_;
  std::string feature_;
  double scale_;
  double shift_;
};

/// Outer model applied to named intermediate nodes, each computed by an
/// inner model over the base features.
class layered_model final : public model {
 public:
  layered_model(model_ptr outer, std::vector<std::pair<std::string, model_ptr>> inner);

  double eval(const feature_vector& x) const override;
  std::vector<std::string> referenced_features() const override;

  const model_ptr& outer() const { return outer_; }
  const std::vector<std::pair<std::string, model_ptr>>& inner() const { return inner_; }

  /// Values of the intermediate nodes at x, in declaration order.
  feature_vector intermediate_values(const feature_vector& x) const;

 private:
  model_ptr outer_;
  std::vector<std::pair<std::string, model_ptr>> inner_;
};

enum class derivative_mode { analytic, central_difference };

double eval_model(const model& m, const feature_vector& x);

/// Central difference uses a step of h * max(1, |x_i|).
double partial_derivative(const model& m, const feature_vector& x, const std::string& feature,
                          derivative_mode mode = derivative_mode::analytic, double h = 1e-6);

}  // namespace shapkit

#endif  // SHAPKIT_MODEL_HPP
