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

#include "shapkit/set_function.hpp"

#include "shapkit/errors.hpp"

namespace shapkit {

set_function::set_function(std::vector<std::string> universe, evaluator fn)
    : universe_(std::move(universe)), fn_(std::move(fn)) {
  if (universe_.empty()) throw argument_error("set function needs a nonempty universe");
  if (universe_.size() > 63) throw size_error("set function universe larger than 63");
  if (!fn_) throw argument_error("set function needs an evaluator");
}

set_function set_function::total(std::vector<std::string> universe,
                                 std::function<double(const feature_subset&)> fn) {
  return set_function(std::move(universe),
                      [fn = std::move(fn)](const feature_subset& s) -> std::optional<double> {
                        return fn(s);
                      });
}

std::optional<double> set_function::evaluate(std::uint64_t mask) const {
  {
    std::lock_guard<std::mutex> lock(memo_mutex_);
    const auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
  }
  const std::optional<double> result = fn_(feature_subset(universe_, mask));
  std::lock_guard<std::mutex> lock(memo_mutex_);
  memo_.emplace(mask, result);
  return result;
}

std::optional<double> set_function::evaluate(const feature_subset& s) const {
  return evaluate(s.mask());
}

double set_function::value(std::uint64_t mask) const {
  const auto v = evaluate(mask);
  if (!v) {
    throw invalid_set_function_error("coalition value is impossible here; use the"
                                     " possibility-aware solver");
  }
  return *v;
}

double set_function::grand_value() const {
  const std::uint64_t full =
      universe_.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << universe_.size()) - 1;
  return value(full);
}

}  // namespace shapkit
