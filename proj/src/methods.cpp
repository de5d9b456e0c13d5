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

#include "shapkit/methods.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>

#include "shapkit/errors.hpp"
#include "shapkit/rng.hpp"

namespace shapkit {

namespace {

void require_matching_features(const feature_vector& x, const feature_vector& baseline) {
  if (!x.same_features(baseline)) {
    throw argument_error("explicand and baseline must define the same features");
  }
}

std::vector<std::size_t> universe_columns(const std::vector<std::string>& universe,
                                          const std::vector<std::string>& columns) {
  std::vector<std::size_t> out;
  out.reserve(universe.size());
  for (const auto& name : universe) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw missing_feature_error(name);
    out.push_back(static_cast<std::size_t>(it - columns.begin()));
  }
  return out;
}

}  // namespace

set_function bshap_game(model_ptr f, const feature_vector& x, const feature_vector& baseline) {
  require_matching_features(x, baseline);
  if (!f) throw argument_error("null model");
  std::vector<std::string> universe = x.names();
  return set_function::total(
      universe, [f = std::move(f), x, baseline, universe](const feature_subset& s) {
        return f->eval(compose_mixed(x, baseline, universe, s.mask()));
      });
}

set_function rbshap_game(model_ptr f, const feature_vector& x, const discrete_distribution& D) {
  if (!f) throw argument_error("null model");
  std::vector<std::string> universe = x.names();
  const auto cols = universe_columns(universe, D.feature_names());

  // One weighted baseline per support atom, projected onto the universe.
  std::vector<std::vector<double>> baselines;
  std::vector<double> probs;
  baselines.reserve(D.atom_count());
  for (std::size_t a = 0; a < D.atom_count(); ++a) {
    if (D.atom_probability(a) == 0.0) continue;
    const auto& row = D.atom_values()[a];
    std::vector<double> b;
    b.reserve(cols.size());
    for (const std::size_t c : cols) b.push_back(row[c]);
    baselines.push_back(std::move(b));
    probs.push_back(D.atom_probability(a));
  }

  std::vector<double> xv;
  xv.reserve(universe.size());
  for (const auto& name : universe) xv.push_back(x.get(name));

  return set_function::total(
      universe,
      [f = std::move(f), universe, xv, baselines, probs](const feature_subset& s) {
        double acc = 0.0;
        feature_vector point;
        for (std::size_t b = 0; b < baselines.size(); ++b) {
          for (std::size_t i = 0; i < universe.size(); ++i) {
            point.set(universe[i], s.contains(i) ? xv[i] : baselines[b][i]);
          }
          acc += probs[b] * f->eval(point);
        }
        return acc;
      });
}

set_function ces_game(model_ptr f, const feature_vector& x, const discrete_distribution& D) {
  if (!f) throw argument_error("null model");
  std::vector<std::string> universe = x.names();
  const auto cols = universe_columns(universe, D.feature_names());

  // Predictions are fixed per atom, so compute them once up front.
  std::vector<double> predictions;
  std::vector<double> probs;
  std::vector<std::uint64_t> agree_masks;
  predictions.reserve(D.atom_count());
  for (std::size_t a = 0; a < D.atom_count(); ++a) {
    if (D.atom_probability(a) == 0.0) continue;
    const auto& row = D.atom_values()[a];
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (row[cols[i]] == x.get(universe[i])) mask |= std::uint64_t{1} << i;
    }
    agree_masks.push_back(mask);
    predictions.push_back(f->eval(D.atom(a)));
    probs.push_back(D.atom_probability(a));
  }

  return set_function::total(
      universe, [universe, predictions, probs, agree_masks](const feature_subset& s) {
        const std::uint64_t want = s.mask();
        double mass = 0.0;
        double acc = 0.0;
        for (std::size_t a = 0; a < predictions.size(); ++a) {
          if ((want & ~agree_masks[a]) != 0) continue;
          mass += probs[a];
          acc += probs[a] * predictions[a];
        }
        if (!(mass > 0.0)) {
          throw conditioning_error("conditioning event has zero probability on subset " +
                                   s.to_string());
        }
        return acc / mass;
      });
}

set_function ces_empirical_game(model_ptr f, const feature_vector& x, const dataset& data,
                                double tau, bool append_explicand) {
  if (!f) throw argument_error("null model");
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw argument_error("smoothing fraction must be finite and nonnegative");
  }
  std::vector<std::string> universe = x.names();
  if (universe.size() > 63) throw size_error("universe larger than 63 features");
  const auto cols = universe_columns(universe, data.feature_names());

  std::vector<double> slack(universe.size(), 0.0);
  if (tau > 0.0) {
    for (std::size_t i = 0; i < universe.size(); ++i) {
      slack[i] = tau * data.feature_std(universe[i]);
    }
  }

  std::vector<double> targets;
  targets.reserve(universe.size());
  for (const auto& name : universe) targets.push_back(x.get(name));

  const auto row_agree_mask = [&](const std::vector<double>& row) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      const double cell = row[cols[i]];
      const bool close =
          tau > 0.0 ? std::abs(cell - targets[i]) <= slack[i] : cell == targets[i];
      if (close) mask |= std::uint64_t{1} << i;
    }
    return mask;
  };

  const std::uint64_t full = (std::uint64_t{1} << universe.size()) - 1;
  std::vector<std::uint64_t> agree;
  std::vector<double> weights;
  std::vector<double> predictions;
  bool explicand_covered = false;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    const auto& row = data.raw_rows()[r];
    const std::uint64_t mask = row_agree_mask(row);
    if (mask == full) explicand_covered = true;
    agree.push_back(mask);
    weights.push_back(data.weight(r));
    predictions.push_back(f->eval(data.row(r)));
  }
  if (append_explicand && !explicand_covered) {
    feature_vector synthetic = data.row_count() > 0 ? data.row(0) : feature_vector{};
    for (const auto& name : data.feature_names()) {
      synthetic.set(name, x.has(name) ? x.get(name) : synthetic.get(name));
    }
    agree.push_back(full);
    weights.push_back(1.0);
    predictions.push_back(f->eval(synthetic));
  }

  return set_function::total(
      universe, [universe, agree, weights, predictions](const feature_subset& s) {
        const std::uint64_t want = s.mask();
        double mass = 0.0;
        double acc = 0.0;
        for (std::size_t r = 0; r < agree.size(); ++r) {
          if ((want & ~agree[r]) != 0) continue;
          mass += weights[r];
          acc += weights[r] * predictions[r];
        }
        if (!(mass > 0.0)) {
          throw conditioning_error("no row agrees with the explicand on subset " +
                                   s.to_string());
        }
        return acc / mass;
      });
}

attribution bshap(const model_ptr& f, const feature_vector& x, const feature_vector& baseline,
                  const engine_options& opts) {
  auto out = shapley_exact(bshap_game(f, x, baseline), opts);
  out.method = "bshap";
  out.baseline_note = baseline.to_string();
  return out;
}

attribution rbshap(const model_ptr& f, const feature_vector& x, const discrete_distribution& D,
                   const engine_options& opts) {
  auto out = shapley_exact(rbshap_game(f, x, D), opts);
  out.method = "rbshap";
  out.distribution_note = std::to_string(D.atom_count()) + "-atom support";
  return out;
}

attribution rbshap_sampled(const model_ptr& f, const feature_vector& x,
                           const discrete_distribution& D, std::size_t n_baselines,
                           std::uint64_t seed, const engine_options& opts) {
  if (n_baselines == 0) throw argument_error("rbshap_sampled needs at least one baseline");
  rng_stream rng(seed);
  std::vector<std::pair<feature_vector, double>> sampled;
  sampled.reserve(n_baselines);
  const double share = 1.0 / static_cast<double>(n_baselines);
  for (std::size_t k = 0; k < n_baselines; ++k) {
    const double u = rng.uniform01();
    double cum = 0.0;
    std::size_t chosen = D.atom_count() - 1;
    for (std::size_t a = 0; a < D.atom_count(); ++a) {
      cum += D.atom_probability(a);
      if (u < cum) {
        chosen = a;
        break;
      }
    }
    bool merged = false;
    for (auto& [atom, w] : sampled) {
      if (atom == D.atom(chosen)) {
        w += share;
        merged = true;
        break;
      }
    }
    if (!merged) sampled.emplace_back(D.atom(chosen), share);
  }
  const auto resampled = discrete_distribution::from_atoms(std::move(sampled));
  auto out = shapley_exact(rbshap_game(f, x, resampled), opts);
  out.method = "rbshap_sampled";
  out.sample_count = n_baselines;
  out.seed = seed;
  out.distribution_note = std::to_string(D.atom_count()) + "-atom support, resampled";
  return out;
}

attribution ces(const model_ptr& f, const feature_vector& x, const discrete_distribution& D,
                const engine_options& opts) {
  auto out = shapley_exact(ces_game(f, x, D), opts);
  out.method = "ces";
  out.distribution_note = std::to_string(D.atom_count()) + "-atom support";
  return out;
}

attribution ces_empirical(const model_ptr& f, const feature_vector& x, const dataset& data,
                          double tau, const engine_options& opts, bool append_explicand) {
  auto out = shapley_exact(ces_empirical_game(f, x, data, tau, append_explicand), opts);
  out.method = "ces_empirical";
  out.distribution_note =
      std::to_string(data.row_count()) + " rows, tau=" + std::to_string(tau);
  return out;
}

attribution ig(const model_ptr& f, const feature_vector& x, const feature_vector& baseline,
               const ig_options& opts) {
  if (!f) throw argument_error("null model");
  require_matching_features(x, baseline);
  if (opts.steps == 0) throw argument_error("quadrature needs at least one step");
  if (opts.gradient == derivative_mode::analytic && !f->has_analytic_gradient()) {
    throw capability_error(
        "model has no analytic gradient; use central-difference mode (piecewise-constant"
        " models such as tree ensembles have zero gradient almost everywhere and are"
        " better served by a set-function method)");
  }
  const std::vector<std::string> universe = x.names();
  const std::size_t n = universe.size();
  std::vector<double> xv(n), bv(n), acc(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    xv[i] = x.get(universe[i]);
    bv[i] = baseline.get(universe[i]);
  }
  feature_vector point = baseline;
  for (std::size_t k = 1; k <= opts.steps; ++k) {
    const double alpha =
        (static_cast<double>(k) - 0.5) / static_cast<double>(opts.steps);
    for (std::size_t i = 0; i < n; ++i) {
      point.set(universe[i], bv[i] + alpha * (xv[i] - bv[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (xv[i] == bv[i]) continue;
      acc[i] += partial_derivative(*f, point, universe[i], opts.gradient, opts.fd_step);
    }
  }
  attribution out;
  out.features = universe;
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.scores[i] = (xv[i] - bv[i]) * acc[i] / static_cast<double>(opts.steps);
  }
  out.method = "ig";
  out.baseline_note = baseline.to_string();
  out.sample_count = opts.steps;
  return out;
}

namespace {

// Natural log of (n choose k) via lgamma; exact zero for the degenerate
// rows that the m=1 case relies on.
double log_binomial(std::size_t n, std::size_t k) {
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

attribution micro_shapley(const model_ptr& f, const feature_vector& x,
                          const feature_vector& baseline, std::size_t m,
                          const micro_options& opts) {
  if (!f) throw argument_error("null model");
  require_matching_features(x, baseline);
  if (m == 0) throw argument_error("micro subdivision count must be at least 1");
  const std::vector<std::string> universe = x.names();
  const std::size_t n = universe.size();

  std::size_t grid_size = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (grid_size > opts.grid_cap / (m + 1)) {
      throw size_error("micro grid exceeds the cap; use micro_shapley_sampled");
    }
    grid_size *= m + 1;
  }

  std::vector<double> xv(n), bv(n);
  for (std::size_t i = 0; i < n; ++i) {
    xv[i] = x.get(universe[i]);
    bv[i] = baseline.get(universe[i]);
  }

  // Tabulate f over the subdivision grid: index digit i counts feature i's
  // switched-on micro features.
  std::vector<double> table(grid_size);
  {
    std::vector<std::size_t> k(n, 0);
    feature_vector point = baseline;
    for (std::size_t idx = 0;; ++idx) {
      for (std::size_t i = 0; i < n; ++i) {
        // Endpoints hit the explicand and baseline coordinates exactly.
        double coord;
        if (k[i] == 0) {
          coord = bv[i];
        } else if (k[i] == m) {
          coord = xv[i];
        } else {
          const double frac = static_cast<double>(k[i]) / static_cast<double>(m);
          coord = bv[i] + frac * (xv[i] - bv[i]);
        }
        point.set(universe[i], coord);
      }
      table[idx] = f->eval(point);
      std::size_t d = 0;
      while (d < n && ++k[d] > m) {
        k[d] = 0;
        ++d;
      }
      if (d == n) break;
    }
  }

  const std::size_t players = n * m;
  std::vector<double> weight_by_size(players);
  for (std::size_t s = 0; s < players; ++s) {
    weight_by_size[s] = shapley_subset_weight(s, players);
  }
  std::vector<double> log_choose_m(m + 1), log_choose_m1(m);
  for (std::size_t k = 0; k <= m; ++k) log_choose_m[k] = log_binomial(m, k);
  for (std::size_t k = 0; k < m; ++k) log_choose_m1[k] = log_binomial(m - 1, k);

  // Micro features of one original feature are interchangeable, so the
  // feature total is m times one micro player's share, and coalitions
  // collapse onto count vectors:
  //   s_i = m * sum_k C(m-1, k_i) prod_{l != i} C(m, k_l)
  //             * w(|k|, n*m) * (F(k + e_i) - F(k)).
  attribution out;
  out.features = universe;
  out.scores.assign(n, 0.0);
  out.method = "micro_shapley";
  out.baseline_note = baseline.to_string();

  std::vector<std::size_t> stride(n);
  {
    std::size_t acc = 1;
    for (std::size_t i = 0; i < n; ++i) {
      stride[i] = acc;
      acc *= m + 1;
    }
  }
  std::vector<std::size_t> k(n, 0);
  for (std::size_t idx = 0;; ++idx) {
    std::size_t total = 0;
    double log_all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += k[i];
      log_all += log_choose_m[k[i]];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (k[i] == m) continue;
      const double log_coeff = log_all - log_choose_m[k[i]] + log_choose_m1[k[i]];
      const double delta = table[idx + stride[i]] - table[idx];
      out.scores[i] += std::exp(log_coeff) * weight_by_size[total] * delta;
    }
    std::size_t d = 0;
    while (d < n && ++k[d] > m) {
      k[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
  for (double& s : out.scores) s *= static_cast<double>(m);
  return out;
}

attribution micro_shapley_sampled(const model_ptr& f, const feature_vector& x,
                                  const feature_vector& baseline, std::size_t m,
                                  std::size_t n_perms, std::uint64_t seed) {
  if (!f) throw argument_error("null model");
  require_matching_features(x, baseline);
  if (m == 0) throw argument_error("micro subdivision count must be at least 1");
  if (n_perms == 0) throw argument_error("sampling needs at least one permutation");
  const std::vector<std::string> universe = x.names();
  const std::size_t n = universe.size();
  std::vector<double> xv(n), bv(n);
  for (std::size_t i = 0; i < n; ++i) {
    xv[i] = x.get(universe[i]);
    bv[i] = baseline.get(universe[i]);
  }

  // Value cache over count vectors, keyed base (m+1) when that fits.
  const bool can_key = n * std::bit_width(m + 1) <= 63;
  std::unordered_map<std::uint64_t, double> cache;
  feature_vector scratch = baseline;
  const auto value_at = [&](const std::vector<std::size_t>& k) {
    std::uint64_t key = 0;
    if (can_key) {
      for (std::size_t i = 0; i < n; ++i) key = key * (m + 1) + k[i];
      const auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double coord;
      if (k[i] == 0) {
        coord = bv[i];
      } else if (k[i] == m) {
        coord = xv[i];
      } else {
        const double frac = static_cast<double>(k[i]) / static_cast<double>(m);
        coord = bv[i] + frac * (xv[i] - bv[i]);
      }
      scratch.set(universe[i], coord);
    }
    const double v = f->eval(scratch);
    if (can_key) cache.emplace(key, v);
    return v;
  };

  std::vector<std::size_t> players(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) players[i * m + j] = i;
  }
  std::vector<double> scores(n, 0.0);
  std::vector<std::size_t> counts(n);
  for (std::size_t p = 0; p < n_perms; ++p) {
    rng_stream stream = rng_stream::derive(seed, p);
    std::vector<std::size_t> order = players;
    stream.shuffle(order);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    double prev = value_at(counts);
    for (const std::size_t feature : order) {
      ++counts[feature];
      const double cur = value_at(counts);
      scores[feature] += cur - prev;
      prev = cur;
    }
  }
  attribution out;
  out.features = universe;
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.scores[i] = scores[i] / static_cast<double>(n_perms);
  }
  out.method = "micro_shapley_sampled";
  out.baseline_note = baseline.to_string();
  out.sample_count = n_perms;
  out.seed = seed;
  return out;
}

namespace {

// Minimum over a uniform tensor grid of the smallest partial derivative,
// analytic when the model carries gradients, central differences otherwise.
double grid_min_partial(const model& f, const std::vector<std::string>& universe,
                        const std::vector<double>& hi, const reduction_options& opts) {
  const std::size_t n = universe.size();
  std::vector<std::size_t> axis_points(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    axis_points[i] = hi[i] > 0.0 ? opts.grid_points_per_axis : 1;
    if (total > opts.grid_cap / axis_points[i]) {
      throw size_error("reduction grid exceeds the cap");
    }
    total *= axis_points[i];
  }
  const derivative_mode mode =
      f.has_analytic_gradient() ? derivative_mode::analytic : derivative_mode::central_difference;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(n, 0);
  feature_vector point;
  for (const auto& name : universe) point.set(name, 0.0);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = axis_points[i] == 1
                           ? 0.0
                           : static_cast<double>(idx[i]) /
                                 static_cast<double>(axis_points[i] - 1);
      point.set(universe[i], t * hi[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double g = partial_derivative(f, point, universe[i], mode, opts.fd_step);
      if (std::isnan(g) || std::isinf(g)) {
        throw reduction_error("derivative estimate is not finite on the box");
      }
      best = std::min(best, g);
    }
    std::size_t d = 0;
    while (d < n && ++idx[d] >= axis_points[d]) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
  return best;
}

}  // namespace

cost_sharing_reduction reduce_to_cost_sharing(const model_ptr& f, const feature_vector& x,
                                              const feature_vector& baseline,
                                              const reduction_options& opts) {
  if (!f) throw argument_error("null model");
  require_matching_features(x, baseline);
  const std::vector<std::string> universe = x.names();
  const std::size_t n = universe.size();

  cost_sharing_reduction out;
  out.scale.resize(n);
  out.shift.resize(n);
  std::vector<double> hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x.get(universe[i]);
    const double bi = baseline.get(universe[i]);
    const double c = xi >= bi ? 1.0 : -1.0;
    out.scale[i] = c;
    out.shift[i] = -c * bi;
    hi[i] = c * (xi - bi);
    out.explicand.set(universe[i], hi[i]);
    out.baseline.set(universe[i], 0.0);
  }

  // Flip coordinates so the explicand dominates a zero baseline.
  model_ptr flipped;
  if (const auto* lin = dynamic_cast<const linear_model*>(f.get())) {
    double intercept = lin->intercept();
    std::vector<std::pair<std::string, double>> coefs;
    for (const auto& [name, coef] : lin->coefficients()) {
      const auto it = std::find(universe.begin(), universe.end(), name);
      if (it == universe.end()) throw missing_feature_error(name);
      intercept += coef * baseline.get(name);
      const std::size_t i = static_cast<std::size_t>(it - universe.begin());
      coefs.emplace_back(name, coef * out.scale[i]);
    }
    flipped = std::make_shared<linear_model>(intercept, std::move(coefs));
  } else if (const auto* ex = dynamic_cast<const expression_model*>(f.get())) {
    expr_ptr root = ex->root();
    for (std::size_t i = 0; i < n; ++i) {
      const expr_ptr replacement =
          expr_add(expr_mul(expr_constant(out.scale[i]), expr_variable(universe[i])),
                   expr_constant(baseline.get(universe[i])));
      root = root->substitute(universe[i], replacement);
    }
    flipped = std::make_shared<expression_model>(root, universe);
  } else {
    model_ptr wrapped = f;
    for (std::size_t i = 0; i < n; ++i) {
      wrapped = std::make_shared<affine_reparam_model>(wrapped, universe[i], out.scale[i],
                                                       out.shift[i]);
    }
    flipped = std::move(wrapped);
  }

  double p;
  if (const auto* lin = dynamic_cast<const linear_model*>(flipped.get())) {
    p = 0.0;
    bool first = true;
    for (const auto& name : universe) {
      const double coef = lin->coefficient(name);
      p = first ? coef : std::min(p, coef);
      first = false;
    }
  } else {
    const double grid_min = grid_min_partial(*flipped, universe, hi, opts);
    p = grid_min < 0.0 ? 1.1 * grid_min : 0.9 * grid_min;
  }
  if (std::isnan(p) || std::isinf(p)) {
    throw reduction_error("partial-derivative bound is not finite");
  }
  out.p = p;

  if (p < 0.0) {
    std::vector<std::pair<std::string, double>> ramp;
    ramp.reserve(n);
    for (const auto& name : universe) ramp.emplace_back(name, -p);
    out.f2 = std::make_shared<linear_model>(0.0, std::move(ramp));
    if (const auto* ex = dynamic_cast<const expression_model*>(flipped.get())) {
      expr_ptr sum = ex->root();
      for (const auto& name : universe) {
        sum = expr_add(sum, expr_mul(expr_constant(-p), expr_variable(name)));
      }
      out.f1 = std::make_shared<expression_model>(sum, universe);
    } else if (const auto* lin = dynamic_cast<const linear_model*>(flipped.get())) {
      std::vector<std::pair<std::string, double>> coefs;
      for (const auto& name : universe) {
        coefs.emplace_back(name, lin->coefficient(name) - p);
      }
      out.f1 = std::make_shared<linear_model>(lin->intercept(), std::move(coefs));
    } else {
      out.f1 = std::make_shared<sum_model>(std::vector<std::pair<double, model_ptr>>{
          {1.0, flipped}, {1.0, out.f2}});
    }
  } else {
    out.f2 = std::make_shared<linear_model>(0.0,
                                            std::vector<std::pair<std::string, double>>{});
    out.f1 = flipped;
  }
  return out;
}

attribution compositional_bshap(const model_ptr& f, const feature_vector& x,
                                const feature_vector& baseline, const engine_options& opts) {
  const auto layered = std::dynamic_pointer_cast<const layered_model>(f);
  if (!layered) throw argument_error("layer-by-layer attribution needs a layered model");
  require_matching_features(x, baseline);

  const feature_vector mid_x = layered->intermediate_values(x);
  const feature_vector mid_b = layered->intermediate_values(baseline);
  const attribution outer = bshap(layered->outer(), mid_x, mid_b, opts);

  attribution out;
  out.features = x.names();
  out.scores.assign(out.features.size(), 0.0);
  out.method = "compositional_bshap(redistribution=abs-proportional, signs kept)";
  out.baseline_note = baseline.to_string();

  for (const auto& [node, inner] : layered->inner()) {
    const double node_score = outer.score(node);
    const attribution share = bshap(inner, x, baseline, opts);
    double denom = 0.0;
    for (const double s : share.scores) denom += std::abs(s);
    for (std::size_t i = 0; i < out.features.size(); ++i) {
      if (denom > 0.0) {
        const double inner_score = share.score(out.features[i]);
        out.scores[i] += node_score * inner_score / denom;
      } else {
        out.scores[i] += node_score / static_cast<double>(out.features.size());
      }
    }
  }

  // Base features the outer model reads directly keep their outer scores.
  for (std::size_t j = 0; j < outer.features.size(); ++j) {
    const std::string& name = outer.features[j];
    const bool is_node = std::any_of(
        layered->inner().begin(), layered->inner().end(),
        [&](const auto& pair) { return pair.first == name; });
    if (is_node) continue;
    const auto it = std::find(out.features.begin(), out.features.end(), name);
    if (it == out.features.end()) {
      throw argument_error("outer model reads '" + name +
                           "' which is neither an inner node nor an input feature");
    }
    out.scores[static_cast<std::size_t>(it - out.features.begin())] +=
        outer.scores[j];
  }
  return out;
}

bool grid_nondecreasing(const model& f, const feature_vector& lo, const feature_vector& hi,
                        std::size_t points_per_axis, double tol) {
  if (points_per_axis < 2) throw argument_error("grid check needs at least two points per axis");
  const std::vector<std::string> universe = lo.names();
  const std::size_t n = universe.size();
  std::vector<double> lov(n), hiv(n);
  for (std::size_t i = 0; i < n; ++i) {
    lov[i] = lo.get(universe[i]);
    hiv[i] = hi.get(universe[i]);
    if (!(hiv[i] >= lov[i])) throw argument_error("grid box needs hi >= lo per feature");
  }
  std::vector<std::size_t> idx(n, 0);
  feature_vector point = lo;
  const auto value_at = [&](const std::vector<std::size_t>& ix) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t =
          static_cast<double>(ix[i]) / static_cast<double>(points_per_axis - 1);
      point.set(universe[i], lov[i] + t * (hiv[i] - lov[i]));
    }
    return f.eval(point);
  };
  for (;;) {
    const double here = value_at(idx);
    for (std::size_t i = 0; i < n; ++i) {
      if (idx[i] + 1 >= points_per_axis) continue;
      auto next = idx;
      ++next[i];
      if (value_at(next) < here - tol) return false;
    }
    std::size_t d = 0;
    while (d < n && ++idx[d] >= points_per_axis) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
  return true;
}

attribution run_attribution(const attribution_request& request) {
  if (!request.f) throw argument_error("attribution request needs a model");
  if (request.explicand.empty()) throw argument_error("attribution request needs an explicand");
  const auto need_baseline = [&]() -> const feature_vector& {
    if (!request.baseline) {
      throw argument_error("method '" + request.method + "' needs a baseline");
    }
    return *request.baseline;
  };
  const auto need_dist = [&]() -> const discrete_distribution& {
    if (!request.dist) {
      throw argument_error("method '" + request.method + "' needs a distribution");
    }
    return *request.dist;
  };

  if (request.method == "bshap") {
    if (request.sampling) {
      auto out = shapley_sampled(bshap_game(request.f, request.explicand, need_baseline()),
                                 *request.sampling);
      out.method = "bshap_sampled";
      return out;
    }
    return bshap(request.f, request.explicand, need_baseline(), request.engine);
  }
  if (request.method == "rbshap") {
    if (request.sampling) {
      return rbshap_sampled(request.f, request.explicand, need_dist(),
                            request.sampling->n_perms, request.sampling->seed, request.engine);
    }
    return rbshap(request.f, request.explicand, need_dist(), request.engine);
  }
  if (request.method == "ces") {
    return ces(request.f, request.explicand, need_dist(), request.engine);
  }
  if (request.method == "ces_empirical") {
    if (!request.data) throw argument_error("ces_empirical needs a dataset");
    return ces_empirical(request.f, request.explicand, *request.data, request.smoothing_tau,
                         request.engine, request.append_explicand);
  }
  if (request.method == "ig") {
    return ig(request.f, request.explicand, need_baseline(), request.ig);
  }
  if (request.method == "micro") {
    if (request.sampling) {
      return micro_shapley_sampled(request.f, request.explicand, need_baseline(),
                                   request.micro_m, request.sampling->n_perms,
                                   request.sampling->seed);
    }
    return micro_shapley(request.f, request.explicand, need_baseline(), request.micro_m);
  }
  throw argument_error("unknown attribution method: " + request.method);
}

}  // namespace shapkit
