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

#include "shapkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "shapkit/errors.hpp"

namespace shapkit::oracle {

namespace {

constexpr std::size_t kPermutationCap = 10;

void check_cap(std::size_t n) {
  if (n == 0) throw argument_error("empty universe");
  if (n > kPermutationCap)
    throw size_error("permutation oracle supports at most " +
                     std::to_string(kPermutationCap) + " players, got " +
                     std::to_string(n));
}

}  // namespace

std::vector<double> permutation_shapley(
    std::size_t n, const std::function<double(std::uint64_t)>& value) {
  check_cap(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double> totals(n, 0.0);
  std::uint64_t count = 0;
  do {
    std::uint64_t mask = 0;
    double before = value(0);
    for (std::size_t idx : order) {
      mask |= std::uint64_t{1} << idx;
      double after = value(mask);
      totals[idx] += after - before;
      before = after;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));

  for (double& t : totals) t /= static_cast<double>(count);
  return totals;
}

std::vector<double> fixed_order_marginals(
    const std::vector<std::size_t>& order,
    const std::function<double(std::uint64_t)>& value) {
  std::vector<double> out(order.size(), 0.0);
  std::uint64_t mask = 0;
  double before = value(0);
  for (std::size_t idx : order) {
    mask |= std::uint64_t{1} << idx;
    double after = value(mask);
    out[idx] = after - before;
    before = after;
  }
  return out;
}

std::vector<double> possible_marginals(
    std::size_t n,
    const std::function<std::optional<double>(std::uint64_t)>& value) {
  check_cap(n);
  std::optional<double> base = value(0);
  if (!base) throw precondition_error("empty coalition is impossible");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  if (!value(full)) throw precondition_error("grand coalition is impossible");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double> totals(n, 0.0);
  std::uint64_t count = 0;
  do {
    std::uint64_t accepted = 0;
    double last = *base;
    std::vector<std::size_t> pending;
    for (std::size_t idx : order) {
      pending.push_back(idx);
      std::uint64_t trial = accepted;
      for (std::size_t p : pending) trial |= std::uint64_t{1} << p;
      std::optional<double> got = value(trial);
      if (!got) continue;
      double marginal = *got - last;
      if (pending.size() == 1) {
        totals[idx] += marginal;
      } else {
        totals[idx] += marginal / 2.0;
        totals[pending.front()] += marginal / 2.0;
      }
      accepted = trial;
      last = *got;
      pending.clear();
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));

  for (double& t : totals) t /= static_cast<double>(count);
  return totals;
}

std::function<double(std::uint64_t)> memoized(
    std::function<double(std::uint64_t)> value) {
  auto cache = std::make_shared<std::unordered_map<std::uint64_t, double>>();
  return [cache, value = std::move(value)](std::uint64_t mask) {
    auto found = cache->find(mask);
    if (found != cache->end()) return found->second;
    double got = value(mask);
    cache->emplace(mask, got);
    return got;
  };
}

double mixed_value(const model& f, const feature_vector& x,
                   const feature_vector& baseline, std::uint64_t mask) {
  feature_vector mixed;
  const std::vector<std::string>& names = x.names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    bool from_explicand = (mask >> i) & 1u;
    mixed.set(names[i],
              from_explicand ? x.get(names[i]) : baseline.get(names[i]));
  }
  return f.eval(mixed);
}

std::vector<double> baseline_shapley(const model& f, const feature_vector& x,
                                     const feature_vector& baseline) {
  return permutation_shapley(
      x.size(), memoized([&f, &x, &baseline](std::uint64_t mask) {
        return mixed_value(f, x, baseline, mask);
      }));
}

double conditional_value(const model& f, const discrete_distribution& d,
                         const feature_vector& x,
                         const std::vector<std::string>& universe,
                         std::uint64_t mask) {
  const std::vector<std::string>& columns = d.feature_names();
  std::vector<std::size_t> picked;
  std::vector<double> wanted;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (!((mask >> i) & 1u)) continue;
    auto at = std::find(columns.begin(), columns.end(), universe[i]);
    if (at == columns.end()) throw missing_feature_error(universe[i]);
    picked.push_back(static_cast<std::size_t>(at - columns.begin()));
    wanted.push_back(x.get(universe[i]));
  }

  double mass = 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < d.atom_count(); ++a) {
    const std::vector<double>& row = d.atom_values()[a];
    bool agrees = true;
    for (std::size_t k = 0; k < picked.size(); ++k) {
      if (row[picked[k]] != wanted[k]) {
        agrees = false;
        break;
      }
    }
    if (!agrees) continue;
    double p = d.atom_probability(a);
    mass += p;
    sum += p * f.eval(d.atom(a));
  }
  if (mass <= 0.0)
    throw conditioning_error("conditioning event has zero probability");
  return sum / mass;
}

std::vector<double> conditional_shapley(const model& f,
                                        const feature_vector& x,
                                        const discrete_distribution& d) {
  const std::vector<std::string> universe = x.names();
  return permutation_shapley(
      universe.size(), memoized([&f, &d, &x, universe](std::uint64_t mask) {
        return conditional_value(f, d, x, universe, mask);
      }));
}

std::vector<double> mixed_baseline_shapley(const model& f,
                                           const feature_vector& x,
                                           const discrete_distribution& d) {
  const std::vector<std::string>& names = x.names();
  std::vector<double> totals(names.size(), 0.0);
  for (std::size_t a = 0; a < d.atom_count(); ++a) {
    feature_vector atom = d.atom(a);
    feature_vector projected;
    for (const std::string& name : names) projected.set(name, atom.get(name));
    std::vector<double> scores = baseline_shapley(f, x, projected);
    double p = d.atom_probability(a);
    for (std::size_t i = 0; i < totals.size(); ++i)
      totals[i] += p * scores[i];
  }
  return totals;
}

std::vector<double> empirical_conditional_shapley(const model& f,
                                                  const feature_vector& x,
                                                  const dataset& data,
                                                  double tau) {
  if (tau < 0.0) throw argument_error("tau must be nonnegative");
  const std::vector<std::string> universe = x.names();
  const std::vector<std::string>& columns = data.feature_names();

  std::vector<std::size_t> column_of(universe.size());
  std::vector<double> slack(universe.size(), 0.0);
  for (std::size_t i = 0; i < universe.size(); ++i) {
    auto at = std::find(columns.begin(), columns.end(), universe[i]);
    if (at == columns.end()) throw missing_feature_error(universe[i]);
    column_of[i] = static_cast<std::size_t>(at - columns.begin());
    if (tau > 0.0) slack[i] = tau * data.feature_std(universe[i]);
  }

  struct weighted_row {
    std::vector<double> values;  // aligned to universe order
    double weight;
  };
  std::vector<weighted_row> rows;
  bool explicand_covered = false;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    weighted_row row;
    row.weight = data.weight(r);
    row.values.resize(universe.size());
    bool full_agreement = true;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      row.values[i] = data.raw_rows()[r][column_of[i]];
      double gap = std::abs(row.values[i] - x.get(universe[i]));
      bool close = (tau > 0.0) ? (gap <= slack[i]) : (gap == 0.0);
      if (!close) full_agreement = false;
    }
    if (full_agreement) explicand_covered = true;
    rows.push_back(std::move(row));
  }
  if (!explicand_covered) {
    weighted_row self;
    self.weight = 1.0;
    self.values.resize(universe.size());
    for (std::size_t i = 0; i < universe.size(); ++i)
      self.values[i] = x.get(universe[i]);
    rows.push_back(std::move(self));
  }

  std::vector<double> predictions(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    feature_vector point;
    for (std::size_t i = 0; i < universe.size(); ++i)
      point.set(universe[i], rows[r].values[i]);
    predictions[r] = f.eval(point);
  }

  auto game = [&](std::uint64_t mask) {
    double mass = 0.0;
    double sum = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool agrees = true;
      for (std::size_t i = 0; i < universe.size(); ++i) {
        if (!((mask >> i) & 1u)) continue;
        double gap = std::abs(rows[r].values[i] - x.get(universe[i]));
        bool close = (tau > 0.0) ? (gap <= slack[i]) : (gap == 0.0);
        if (!close) {
          agrees = false;
          break;
        }
      }
      if (!agrees) continue;
      mass += rows[r].weight;
      sum += rows[r].weight * predictions[r];
    }
    if (mass <= 0.0)
      throw conditioning_error("conditioning event selects no rows");
    return sum / mass;
  };

  return permutation_shapley(universe.size(), memoized(game));
}

std::vector<double> micro_grid_shapley(const model& f, const feature_vector& x,
                                       const feature_vector& baseline,
                                       std::size_t m) {
  if (m == 0) throw argument_error("m must be positive");
  const std::vector<std::string>& names = x.names();
  const std::size_t n = names.size();
  check_cap(n * m);

  auto game = [&](std::uint64_t mask) {
    feature_vector point;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t k = 0;
      for (std::size_t j = 0; j < m; ++j)
        if ((mask >> (i * m + j)) & 1u) ++k;
      double bv = baseline.get(names[i]);
      double xv = x.get(names[i]);
      double t = static_cast<double>(k) / static_cast<double>(m);
      point.set(names[i], bv + t * (xv - bv));
    }
    return f.eval(point);
  };

  std::vector<double> micro = permutation_shapley(n * m, memoized(game));
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i] += micro[i * m + j];
  return out;
}

}  // namespace shapkit::oracle
