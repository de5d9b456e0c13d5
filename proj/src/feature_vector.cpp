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

#include "shapkit/feature_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace shapkit {

namespace {

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return names.size();
}

}  // namespace

feature_vector::feature_vector(std::initializer_list<std::pair<std::string, double>> entries) {
  for (const auto& [name, value] : entries) set(name, value);
}

feature_vector::feature_vector(std::vector<std::string> names, std::vector<double> values) {
  if (names.size() != values.size()) {
    throw argument_error("feature_vector: name/value count mismatch");
  }
  for (std::size_t i = 0; i < names.size(); ++i) set(names[i], values[i]);
}

void feature_vector::set(const std::string& name, double value) {
  if (!std::isfinite(value)) {
    throw argument_error("feature_vector: non-finite value for '" + name + "'");
  }
  std::size_t i = index_of(names_, name);
  if (i == names_.size()) {
    names_.push_back(name);
    values_.push_back(value);
  } else {
    values_[i] = value;
  }
}

double feature_vector::get(const std::string& name) const {
  std::size_t i = index_of(names_, name);
  if (i == names_.size()) throw missing_feature_error(name);
  return values_[i];
}

std::optional<double> feature_vector::maybe_get(const std::string& name) const {
  std::size_t i = index_of(names_, name);
  if (i == names_.size()) return std::nullopt;
  return values_[i];
}

bool feature_vector::has(const std::string& name) const {
  return index_of(names_, name) != names_.size();
}

feature_vector feature_vector::with(const std::string& name, double value) const {
  std::size_t i = index_of(names_, name);
  if (i == names_.size()) throw missing_feature_error(name);
  feature_vector out = *this;
  out.values_[i] = value;
  return out;
}

bool feature_vector::operator==(const feature_vector& other) const {
  if (names_.size() != other.names_.size()) return false;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto v = other.maybe_get(names_[i]);
    if (!v || *v != values_[i]) return false;
  }
  return true;
}

bool feature_vector::same_features(const feature_vector& other) const {
  if (names_.size() != other.names_.size()) return false;
  return std::all_of(names_.begin(), names_.end(),
                     [&](const std::string& n) { return other.has(n); });
}

std::string feature_vector::to_string() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i) os << ", ";
    os << names_[i] << "=" << values_[i];
  }
  os << "}";
  return os.str();
}

feature_subset::feature_subset(std::vector<std::string> universe, std::uint64_t mask)
    : universe_(std::move(universe)), mask_(mask) {
  if (universe_.size() > 63) throw size_error("feature_subset: universe larger than 63");
  if (mask_ >> universe_.size()) {
    throw argument_error("feature_subset: mask has bits outside the universe");
  }
}

feature_subset::feature_subset(std::vector<std::string> universe,
                               const std::vector<std::string>& members)
    : universe_(std::move(universe)) {
  for (const auto& m : members) {
    std::size_t i = index_of(universe_, m);
    if (i == universe_.size()) {
      throw argument_error("feature_subset: member '" + m + "' not in universe");
    }
    mask_ |= std::uint64_t{1} << i;
  }
}

feature_subset feature_subset::empty_set(std::vector<std::string> universe) {
  return feature_subset(std::move(universe), std::uint64_t{0});
}

feature_subset feature_subset::full_set(std::vector<std::string> universe) {
  std::uint64_t mask =
      universe.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << universe.size()) - 1;
  return feature_subset(std::move(universe), mask);
}

bool feature_subset::contains(const std::string& name) const {
  std::size_t i = index_of(universe_, name);
  return i != universe_.size() && contains(i);
}

std::size_t feature_subset::count() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::string> feature_subset::members() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (contains(i)) out.push_back(universe_[i]);
  }
  return out;
}

feature_subset feature_subset::with_index(std::size_t index) const {
  return feature_subset(universe_, mask_ | (std::uint64_t{1} << index));
}

feature_subset feature_subset::without_index(std::size_t index) const {
  return feature_subset(universe_, mask_ & ~(std::uint64_t{1} << index));
}

bool feature_subset::subset_of(const feature_subset& other) const {
  return (mask_ & ~other.mask_) == 0;
}

std::string feature_subset::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (!contains(i)) continue;
    if (!first) os << ", ";
    os << universe_[i];
    first = false;
  }
  os << "}";
  return os.str();
}

feature_vector compose_mixed(const feature_vector& x, const feature_vector& baseline,
                             const std::vector<std::string>& universe, std::uint64_t mask) {
  feature_vector out;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const bool from_explicand = (mask >> i) & 1u;
    out.set(universe[i], from_explicand ? x.get(universe[i]) : baseline.get(universe[i]));
  }
  return out;
}

}  // namespace shapkit
