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

#ifndef SHAPKIT_EXPRESSION_HPP
#define SHAPKIT_EXPRESSION_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <string>

#include "shapkit/feature_vector.hpp"

namespace shapkit {

class expr_node;
using expr_ptr = std::shared_ptr<const expr_node>;

/// Immutable arithmetic/boolean AST over named features.
///
/// Arithmetic: + - * / ^k (integer power), min, max, sqrt, unary minus.
/// Boolean (for possibility predicates): == != < <= > >= && || !, evaluating
/// to 1.0/0.0. Derivatives of comparisons are taken as zero, which is correct
/// away from their switching surfaces; min/max differentiate piecewise.
class expr_node {
 public:
  virtual ~expr_node() = default;

  virtual double eval(const feature_vector& x) const = 0;

  /// Symbolic d/d(feature). Exact wherever the expression is differentiable.
  virtual expr_ptr derivative(const std::string& feature) const = 0;

  /// Replace every occurrence of `feature` with `replacement`.
  virtual expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const = 0;

  virtual void collect_variables(std::set<std::string>& out) const = 0;

  /// Re-parseable text form.
  virtual std::string text() const = 0;
};

// Constructors with light constant folding.
expr_ptr expr_constant(double value);
expr_ptr expr_variable(const std::string& name);
expr_ptr expr_add(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_sub(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_mul(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_div(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_neg(const expr_ptr& a);
expr_ptr expr_min(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_max(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_sqrt(const expr_ptr& a);
expr_ptr expr_ipow(const expr_ptr& base, std::int64_t exponent);
expr_ptr expr_compare(const std::string& op, const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_and(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_or(const expr_ptr& a, const expr_ptr& b);
expr_ptr expr_not(const expr_ptr& a);

/// Parse the infix grammar. Throws parse_error with position info.
expr_ptr parse_expression(const std::string& source);

}  // namespace shapkit

#endif  // SHAPKIT_EXPRESSION_HPP
