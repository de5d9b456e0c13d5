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

#include "shapkit/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "shapkit/errors.hpp"

namespace shapkit {

namespace {

constexpr std::size_t kGridCap = 200000;
constexpr double kExactSlack = 1e-12;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kExactSlack * std::max({1.0, std::abs(a), std::abs(b)});
}

feature_vector project(const feature_vector& src,
                       const std::vector<std::string>& names) {
  feature_vector out;
  for (const std::string& name : names) out.set(name, src.get(name));
  return out;
}

double score_or_zero(const attribution& attr, const std::string& name) {
  for (std::size_t i = 0; i < attr.features.size(); ++i)
    if (attr.features[i] == name) return attr.scores[i];
  return 0.0;
}

const std::vector<double>& grid_values(const value_grid& grid,
                                       const std::string& name) {
  for (const auto& [feature, values] : grid)
    if (feature == name) {
      if (values.empty())
        throw instance_error("grid for feature " + name + " is empty");
      return values;
    }
  throw instance_error("grid does not cover feature " + name);
}

/// Odometer over the per-feature candidate lists of `names`.
void for_each_grid_point(const value_grid& grid,
                         const std::vector<std::string>& names,
                         const std::function<void(const feature_vector&)>& visit) {
  std::vector<const std::vector<double>*> lists;
  std::size_t combos = 1;
  for (const std::string& name : names) {
    lists.push_back(&grid_values(grid, name));
    combos *= lists.back()->size();
    if (combos > kGridCap)
      throw instance_error("antecedent grid exceeds " +
                           std::to_string(kGridCap) + " combinations");
  }

  std::vector<std::size_t> at(names.size(), 0);
  feature_vector point;
  for (std::size_t i = 0; i < names.size(); ++i)
    point.set(names[i], (*lists[i])[0]);
  while (true) {
    visit(point);
    std::size_t k = 0;
    while (k < names.size()) {
      if (++at[k] < lists[k]->size()) {
        point.set(names[k], (*lists[k])[at[k]]);
        break;
      }
      at[k] = 0;
      point.set(names[k], (*lists[k])[0]);
      ++k;
    }
    if (k == names.size()) break;
  }
}

std::vector<std::string> names_without(const std::vector<std::string>& names,
                                       const std::string& skip) {
  std::vector<std::string> out;
  for (const std::string& name : names)
    if (name != skip) out.push_back(name);
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out;
  if (points == 1 || lo == hi) {
    out.push_back(lo);
    return out;
  }
  out.reserve(points);
  for (std::size_t k = 0; k < points; ++k)
    out.push_back(lo + (hi - lo) * static_cast<double>(k) /
                           static_cast<double>(points - 1));
  return out;
}

}  // namespace

std::vector<axiom_id> all_axioms() {
  return {axiom_id::dummy,          axiom_id::efficiency,
          axiom_id::linearity,      axiom_id::symmetry,
          axiom_id::asi,            axiom_id::demand_monotonicity,
          axiom_id::proportionality, axiom_id::strong_monotonicity};
}

std::string axiom_name(axiom_id id) {
  switch (id) {
    case axiom_id::dummy: return "dummy";
    case axiom_id::efficiency: return "efficiency";
    case axiom_id::linearity: return "linearity";
    case axiom_id::symmetry: return "symmetry";
    case axiom_id::asi: return "asi";
    case axiom_id::demand_monotonicity: return "demand_monotonicity";
    case axiom_id::proportionality: return "proportionality";
    case axiom_id::strong_monotonicity: return "strong_monotonicity";
  }
  throw argument_error("unknown axiom id");
}

axiom_id axiom_from_name(const std::string& name) {
  for (axiom_id id : all_axioms())
    if (axiom_name(id) == name) return id;
  throw lookup_error("unknown axiom: " + name +
                     " (expected dummy, efficiency, linearity, symmetry, asi, "
                     "demand_monotonicity, proportionality, or "
                     "strong_monotonicity)");
}

attribution run_in_context(const method_context& ctx, const model_ptr& f,
                           const feature_vector& x) {
  if (!f) throw argument_error("model is null");
  if (x.empty()) {
    attribution empty;
    empty.method = ctx.method;
    return empty;
  }

  const std::string& m = ctx.method;
  auto need_baseline = [&]() -> feature_vector {
    if (!ctx.baseline)
      throw instance_error("method " + m + " needs a baseline");
    return project(*ctx.baseline, x.names());
  };

  if (m == "bshap") return bshap(f, x, need_baseline(), ctx.engine);
  if (m == "rbshap") {
    if (!ctx.dist) throw instance_error("rbshap needs a distribution");
    return rbshap(f, x, *ctx.dist, ctx.engine);
  }
  if (m == "ces") {
    if (!ctx.dist) throw instance_error("ces needs a distribution");
    return ces(f, x, *ctx.dist, ctx.engine);
  }
  if (m == "ces_empirical") {
    if (!ctx.data) throw instance_error("ces_empirical needs a dataset");
    return ces_empirical(f, x, *ctx.data, ctx.tau, ctx.engine);
  }
  if (m == "ig") return ig(f, x, need_baseline(), ctx.ig);
  if (m == "pms") {
    if (!ctx.poss) throw instance_error("pms needs a possibility predicate");
    return pms(f, x, need_baseline(), *ctx.poss);
  }
  if (m == "micro") return micro_shapley(f, x, need_baseline(), ctx.micro_m);
  throw argument_error("unknown method: " + m);
}

double reference_value(const method_context& ctx, const model_ptr& f,
                       const feature_vector& x) {
  const std::string& m = ctx.method;
  if (m == "rbshap" || m == "ces") {
    if (!ctx.dist) throw instance_error(m + " needs a distribution");
    return ctx.dist->expectation(*f);
  }
  if (m == "ces_empirical") {
    if (!ctx.data) throw instance_error("ces_empirical needs a dataset");
    return ces_empirical_game(f, x, *ctx.data, ctx.tau).empty_value();
  }
  if (!ctx.baseline) throw instance_error("method " + m + " needs a baseline");
  return f->eval(project(*ctx.baseline, x.names()));
}

discrete_distribution transform_distribution(const discrete_distribution& d,
                                             const std::string& feature,
                                             double scale, double shift) {
  std::vector<std::pair<feature_vector, double>> atoms;
  atoms.reserve(d.atom_count());
  for (std::size_t a = 0; a < d.atom_count(); ++a) {
    feature_vector atom = d.atom(a);
    atom.set(feature, scale * atom.get(feature) + shift);
    atoms.emplace_back(std::move(atom), d.atom_probability(a));
  }
  return discrete_distribution::from_atoms(std::move(atoms));
}

namespace {

// --- antecedent verifiers ---------------------------------------------------

std::string verify_dummy_antecedent(const model& f, const value_grid& grid,
                                    const std::vector<std::string>& names,
                                    const std::string& feature) {
  const std::vector<double>& candidates = grid_values(grid, feature);
  bool holds = true;
  std::string offending;
  for_each_grid_point(grid, names_without(names, feature),
                      [&](const feature_vector& rest) {
                        if (!holds) return;
                        feature_vector point = rest;
                        point.set(feature, candidates[0]);
                        double first = f.eval(point);
                        for (double v : candidates) {
                          point.set(feature, v);
                          if (!nearly_equal(f.eval(point), first)) {
                            holds = false;
                            offending = point.to_string();
                            return;
                          }
                        }
                      });
  if (!holds)
    throw instance_error("feature " + feature +
                         " is not dummy in the model; differs at " + offending);
  return "verified dummy over the grid";
}

std::string verify_symmetry_antecedent(const model& f, const value_grid& grid,
                                       const std::vector<std::string>& names,
                                       const std::string& a,
                                       const std::string& b) {
  bool holds = true;
  std::string offending;
  for_each_grid_point(grid, names, [&](const feature_vector& point) {
    if (!holds) return;
    feature_vector swapped = point;
    swapped.set(a, point.get(b));
    swapped.set(b, point.get(a));
    if (!nearly_equal(f.eval(point), f.eval(swapped))) {
      holds = false;
      offending = point.to_string();
    }
  });
  if (!holds)
    throw instance_error("model is not symmetric in " + a + ", " + b +
                         "; differs at " + offending);
  return "verified symmetric over the grid";
}

std::string verify_monotone_antecedent(const model& f, const value_grid& grid,
                                       const std::vector<std::string>& names,
                                       const std::string& feature) {
  std::vector<double> ladder = grid_values(grid, feature);
  std::sort(ladder.begin(), ladder.end());
  bool holds = true;
  std::string offending;
  for_each_grid_point(grid, names_without(names, feature),
                      [&](const feature_vector& rest) {
                        if (!holds) return;
                        feature_vector point = rest;
                        point.set(feature, ladder[0]);
                        double prev = f.eval(point);
                        for (std::size_t k = 1; k < ladder.size(); ++k) {
                          point.set(feature, ladder[k]);
                          double cur = f.eval(point);
                          if (cur < prev - kExactSlack) {
                            holds = false;
                            offending = point.to_string();
                            return;
                          }
                          prev = cur;
                        }
                      });
  if (!holds)
    throw instance_error("model is not non-decreasing in " + feature +
                         "; decreases at " + offending);
  return "verified non-decreasing in " + feature + " over the grid";
}

std::string verify_sum_dependence_antecedent(
    const model& f, const value_grid& grid,
    const std::vector<std::string>& names) {
  // Points with equal coordinate sums must map to equal values. The grid
  // has to produce at least one sum collision for the check to bite.
  std::map<double, double> value_by_sum;
  std::size_t collisions = 0;
  bool holds = true;
  std::string offending;
  for_each_grid_point(grid, names, [&](const feature_vector& point) {
    if (!holds) return;
    double sum = 0.0;
    for (const std::string& name : names) sum += point.get(name);
    double value = f.eval(point);
    auto [at, inserted] = value_by_sum.emplace(sum, value);
    if (inserted) return;
    ++collisions;
    if (!nearly_equal(at->second, value)) {
      holds = false;
      offending = point.to_string();
    }
  });
  if (!holds)
    throw instance_error(
        "model is not a function of the coordinate sum; differs at " +
        offending);
  if (collisions == 0)
    throw instance_error(
        "grid produced no equal-sum collisions; cannot verify "
        "sum-dependence (assert the antecedent or adjust the grid)");
  return "verified sum-dependence over " + std::to_string(collisions) +
         " equal-sum collisions";
}

std::string verify_derivative_dominance(const model& weaker,
                                        const model& stronger,
                                        const std::string& feature,
                                        const feature_vector& lo,
                                        const feature_vector& hi,
                                        std::size_t points) {
  const std::vector<std::string>& names = lo.names();
  value_grid grid;
  std::size_t combos = 1;
  for (const std::string& name : names) {
    grid.emplace_back(name, linspace(lo.get(name), hi.get(name), points));
    combos *= grid.back().second.size();
    if (combos > 2000000)
      throw instance_error("derivative grid exceeds 2000000 points");
  }

  auto mode_for = [](const model& m) {
    return m.has_analytic_gradient() ? derivative_mode::analytic
                                     : derivative_mode::central_difference;
  };
  derivative_mode weak_mode = mode_for(weaker);
  derivative_mode strong_mode = mode_for(stronger);

  bool holds = true;
  std::string offending;
  for_each_grid_point(grid, names, [&](const feature_vector& point) {
    if (!holds) return;
    double dw = partial_derivative(weaker, point, feature, weak_mode);
    double ds = partial_derivative(stronger, point, feature, strong_mode);
    if (dw < -1e-9 || ds < dw - 1e-9) {
      holds = false;
      offending = point.to_string();
    }
  });
  if (!holds)
    throw instance_error("derivative dominance fails for " + feature + " at " +
                         offending);
  return "verified derivative dominance on the box grid";
}

// --- consequent helpers -----------------------------------------------------

std::vector<std::string> referenced_universe(const model& f,
                                             const feature_vector& x) {
  std::vector<std::string> refs = f.referenced_features();
  std::unordered_set<std::string> lookup(refs.begin(), refs.end());
  std::vector<std::string> out;
  for (const std::string& name : x.names())
    if (lookup.count(name)) out.push_back(name);
  for (const std::string& name : refs)
    if (!x.has(name))
      throw instance_error("model references feature " + name +
                           " that the explicand does not define");
  return out;
}

/// Attribution over the features the model actually references; features it
/// ignores read as zero. Keeps the check meaningful for methods that do not
/// satisfy the dummy axiom.
attribution run_on_referenced(const method_context& ctx, const model_ptr& f,
                              const feature_vector& x) {
  std::vector<std::string> universe = referenced_universe(*f, x);
  return run_in_context(ctx, f, project(x, universe));
}

std::string format_scores(const attribution& attr) {
  std::ostringstream oss;
  oss << "{";
  for (std::size_t i = 0; i < attr.features.size(); ++i) {
    if (i) oss << ", ";
    oss << attr.features[i] << ": " << attr.scores[i];
  }
  oss << "}";
  return oss.str();
}

}  // namespace

axiom_report check_axiom(const axiom_check& check) {
  if (!check.f) throw argument_error("check has no model");
  axiom_report report;
  report.axiom = check.axiom;
  report.method = check.method.method;

  const feature_vector& x = check.explicand;
  const std::vector<std::string>& names = x.names();
  const double tol = check.tolerance;

  auto note_antecedent = [&](std::function<std::string()> verify,
                             const std::string& asserted_note) {
    if (check.antecedent_asserted) {
      report.antecedent_holds = true;
      report.antecedent_note = asserted_note;
      return;
    }
    report.antecedent_note = verify();
    report.antecedent_holds = true;
  };

  switch (check.axiom) {
    case axiom_id::dummy: {
      if (check.feature.empty()) throw instance_error("dummy needs a feature");
      note_antecedent(
          [&] {
            return verify_dummy_antecedent(*check.f, check.grid, names,
                                           check.feature);
          },
          "dummy-ness asserted");
      attribution attr = run_in_context(check.method, check.f, x);
      double score = score_or_zero(attr, check.feature);
      report.deviation = std::abs(score);
      report.pass = report.deviation <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << "dummy feature " << check.feature << " scored " << score
            << " in " << format_scores(attr);
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::efficiency: {
      report.antecedent_holds = true;
      report.antecedent_note = "no antecedent";
      attribution attr = run_in_context(check.method, check.f, x);
      double target = check.f->eval(x) - reference_value(check.method, check.f, x);
      report.deviation = std::abs(attr.sum() - target);
      report.pass = report.deviation <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << "scores sum to " << attr.sum() << ", expected " << target
            << " from " << format_scores(attr);
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::linearity: {
      if (!check.f2) throw instance_error("linearity needs a second model");
      report.antecedent_holds = true;
      report.antecedent_note =
          "no antecedent; each model attributed over its referenced features";
      model_ptr combined = std::make_shared<sum_model>(
          std::vector<std::pair<double, model_ptr>>{{check.combo_a, check.f},
                                                    {check.combo_b, check.f2}});
      attribution a1 = run_on_referenced(check.method, check.f, x);
      attribution a2 = run_on_referenced(check.method, check.f2, x);
      attribution both = run_on_referenced(check.method, combined, x);
      double worst = 0.0;
      std::string worst_feature;
      for (const std::string& name : names) {
        double lhs = score_or_zero(both, name);
        double rhs = check.combo_a * score_or_zero(a1, name) +
                     check.combo_b * score_or_zero(a2, name);
        double dev = std::abs(lhs - rhs);
        if (dev > worst) {
          worst = dev;
          worst_feature = name;
        }
      }
      report.deviation = worst;
      report.pass = worst <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << "feature " << worst_feature << ": combined "
            << score_or_zero(both, worst_feature) << " vs parts "
            << check.combo_a << "*" << score_or_zero(a1, worst_feature)
            << " + " << check.combo_b << "*" << score_or_zero(a2, worst_feature);
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::symmetry: {
      if (check.feature.empty() || check.feature2.empty())
        throw instance_error("symmetry needs a feature pair");
      if (!nearly_equal(x.get(check.feature), x.get(check.feature2)))
        throw instance_error("explicand breaks the symmetry antecedent: " +
                             check.feature + " vs " + check.feature2);
      if (check.method.baseline) {
        const feature_vector& b = *check.method.baseline;
        if (!nearly_equal(b.get(check.feature), b.get(check.feature2)))
          throw instance_error("baseline breaks the symmetry antecedent");
      }
      note_antecedent(
          [&] {
            return verify_symmetry_antecedent(*check.f, check.grid, names,
                                              check.feature, check.feature2);
          },
          "symmetry asserted");
      attribution attr = run_in_context(check.method, check.f, x);
      double a = score_or_zero(attr, check.feature);
      double b = score_or_zero(attr, check.feature2);
      report.deviation = std::abs(a - b);
      report.pass = report.deviation <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << check.feature << " scored " << a << " but " << check.feature2
            << " scored " << b;
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::asi: {
      if (check.feature.empty()) throw instance_error("asi needs a feature");
      if (check.asi_scale == 0.0)
        throw instance_error("asi scale must be nonzero");
      report.antecedent_holds = true;
      report.antecedent_note = "no antecedent";

      // The reparametrized model reads the feature in transformed units, so
      // it runs against the transformed frame; the pair must agree with the
      // original model on the original frame.
      model_ptr reparam = std::make_shared<affine_reparam_model>(
          check.f, check.feature, check.asi_scale, check.asi_shift);
      attribution lhs = run_in_context(check.method, check.f, x);

      feature_vector xt = x;
      xt.set(check.feature,
             check.asi_scale * x.get(check.feature) + check.asi_shift);
      method_context moved = check.method;
      if (moved.baseline) {
        feature_vector bt = *moved.baseline;
        bt.set(check.feature,
               check.asi_scale * bt.get(check.feature) + check.asi_shift);
        moved.baseline = bt;
      }
      if (moved.dist)
        moved.dist = transform_distribution(*moved.dist, check.feature,
                                            check.asi_scale, check.asi_shift);
      if (moved.data) {
        std::vector<std::vector<double>> rows = moved.data->raw_rows();
        const std::vector<std::string>& cols = moved.data->feature_names();
        auto at = std::find(cols.begin(), cols.end(), check.feature);
        if (at == cols.end()) throw missing_feature_error(check.feature);
        std::size_t col = static_cast<std::size_t>(at - cols.begin());
        for (auto& row : rows)
          row[col] = check.asi_scale * row[col] + check.asi_shift;
        std::optional<std::vector<double>> weights;
        if (moved.data->has_weights()) {
          std::vector<double> w(moved.data->row_count());
          for (std::size_t r = 0; r < w.size(); ++r)
            w[r] = moved.data->weight(r);
          weights = std::move(w);
        }
        moved.data = dataset(moved.data->feature_names(), std::move(rows),
                             std::move(weights));
      }
      if (moved.poss && moved.poss->describe() != "always possible")
        throw instance_error(
            "asi cannot transform a value-dependent possibility predicate");
      attribution rhs = run_in_context(moved, reparam, xt);

      double worst = 0.0;
      std::string worst_feature;
      for (const std::string& name : names) {
        double dev =
            std::abs(score_or_zero(lhs, name) - score_or_zero(rhs, name));
        if (dev > worst) {
          worst = dev;
          worst_feature = name;
        }
      }
      report.deviation = worst;
      report.pass = worst <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << "feature " << worst_feature << ": "
            << score_or_zero(lhs, worst_feature) << " before vs "
            << score_or_zero(rhs, worst_feature) << " after the transform";
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::demand_monotonicity: {
      if (check.feature.empty())
        throw instance_error("demand monotonicity needs a feature");
      if (!check.raised_explicand)
        throw instance_error("demand monotonicity needs a raised explicand");
      const feature_vector& hi = *check.raised_explicand;
      if (!hi.same_features(x))
        throw instance_error("raised explicand has different features");
      for (const std::string& name : names) {
        if (name == check.feature) continue;
        if (!nearly_equal(hi.get(name), x.get(name)))
          throw instance_error(
              "raised explicand changes more than the target feature");
      }
      if (hi.get(check.feature) < x.get(check.feature))
        throw instance_error("raised explicand lowers the target feature");
      note_antecedent(
          [&] {
            return verify_monotone_antecedent(*check.f, check.grid, names,
                                              check.feature);
          },
          "monotonicity asserted");
      attribution low = run_in_context(check.method, check.f, x);
      attribution high = run_in_context(check.method, check.f, hi);
      double s_low = score_or_zero(low, check.feature);
      double s_high = score_or_zero(high, check.feature);
      report.deviation = std::max(0.0, s_low - s_high);
      report.pass = report.deviation <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << check.feature << " scored " << s_low << " at "
            << x.get(check.feature) << " but " << s_high << " at "
            << hi.get(check.feature);
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::proportionality: {
      if (!check.method.baseline)
        throw instance_error("proportionality needs a baseline method");
      feature_vector b = project(*check.method.baseline, names);
      for (const std::string& name : names)
        if (b.get(name) != 0.0)
          throw instance_error("proportionality requires a zero baseline");
      note_antecedent(
          [&] {
            return verify_sum_dependence_antecedent(*check.f, check.grid,
                                                    names);
          },
          "sum-dependence asserted");
      attribution attr = run_in_context(check.method, check.f, x);
      double worst = 0.0;
      std::string worst_pair;
      for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
          double cross = std::abs(score_or_zero(attr, names[i]) * x.get(names[j]) -
                                  score_or_zero(attr, names[j]) * x.get(names[i]));
          if (cross > worst) {
            worst = cross;
            worst_pair = names[i] + "/" + names[j];
          }
        }
      }
      report.deviation = worst;
      report.pass = worst <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << "scores not proportional to the explicand at " << worst_pair
            << ": " << format_scores(attr);
        report.witness = oss.str();
      }
      break;
    }

    case axiom_id::strong_monotonicity: {
      if (!check.f2)
        throw instance_error("strong monotonicity needs a dominating model");
      if (check.feature.empty())
        throw instance_error("strong monotonicity needs a feature");
      if (!check.box && !check.antecedent_asserted)
        throw instance_error(
            "strong monotonicity needs a box for the derivative grid");
      note_antecedent(
          [&] {
            return verify_derivative_dominance(
                *check.f, *check.f2, check.feature, check.box->first,
                check.box->second, check.box_points);
          },
          "derivative dominance asserted");
      attribution weak = run_in_context(check.method, check.f, x);
      attribution strong = run_in_context(check.method, check.f2, x);
      double s_weak = std::abs(score_or_zero(weak, check.feature));
      double s_strong = std::abs(score_or_zero(strong, check.feature));
      report.deviation = std::max(0.0, s_weak - s_strong);
      report.pass = report.deviation <= tol;
      if (!report.pass) {
        std::ostringstream oss;
        oss << "|" << check.feature << "| attribution fell from " << s_weak
            << " to " << s_strong << " despite larger partials";
        report.witness = oss.str();
      }
      break;
    }
  }

  return report;
}

}  // namespace shapkit
