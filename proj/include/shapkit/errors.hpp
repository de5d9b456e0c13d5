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

#ifndef SHAPKIT_ERRORS_HPP
#define SHAPKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shapkit {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// An input vector does not define a feature the model references.
class missing_feature_error : public error {
 public:
  explicit missing_feature_error(const std::string& feature)
      : error("input does not define feature '" + feature + "'"), feature_(feature) {}
  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

/// Lookup-table evaluation missed every row and no default was configured.
class lookup_error : public error {
 public:
  using error::error;
};

/// Arithmetic left the function's domain (division by zero, sqrt of a negative).
class domain_error : public error {
 public:
  using error::error;
};

/// An operation was requested on a model variant that cannot provide it.
class capability_error : public error {
 public:
  using error::error;
};

/// A configured size cap (feature count, support size) was exceeded.
class size_error : public error {
 public:
  using error::error;
};

/// A conditioning event has zero probability under the distribution.
class conditioning_error : public error {
 public:
  using error::error;
};

/// A set function produced the invalid marker where a real was required.
class invalid_set_function_error : public error {
 public:
  using error::error;
};

/// A caller-supplied argument violates an operation's contract.
class argument_error : public error {
 public:
  using error::error;
};

/// A precondition on explicand/baseline/possibility inputs does not hold.
class precondition_error : public error {
 public:
  using error::error;
};

/// Text input (expression, CSV, JSON) could not be parsed.
class parse_error : public error {
 public:
  using error::error;
};

/// File system failure, annotated with the offending path.
class io_error : public error {
 public:
  using error::error;
};

/// An axiom check instance cannot verify its antecedent and was not asserted.
class instance_error : public error {
 public:
  using error::error;
};

/// Derivative estimates in the cost-sharing reduction were unbounded or NaN.
class reduction_error : public error {
 public:
  using error::error;
};

}  // namespace shapkit

#endif  // SHAPKIT_ERRORS_HPP
