/*
 * Copyright 2026 The shapkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Cohort runs: the same model attributed for many dataset rows under several
// methods, with per-feature score distributions written out as CSV, JSON
// summaries, and self-contained SVG box plots.

#ifndef SHAPKIT_REPORT_HPP_
#define SHAPKIT_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapkit/dataset.hpp"
#include "shapkit/methods.hpp"
#include "shapkit/model.hpp"

namespace shapkit {

// One attribution method of a cohort run. `tau` applies to ces_empirical.
struct cohort_method {
  std::string kind;  // bshap | ces_empirical | rbshap | ig | pms
  double tau = 0.0;

  // Label used in filenames and report rows, e.g. "ces_empirical-tau0.1".
  std::string label() const;
};

struct cohort_options {
  std::vector<cohort_method> methods;

  // Explicands: explicit dataset row indices, or a seeded sample of
  // `sample_count` distinct rows when `rows` is empty.
  std::vector<std::size_t> rows;
  std::size_t sample_count = 20;
  std::uint64_t seed = 20260801;

  // bshap/ig/pms run against the dataset's per-feature weighted means.
  engine_options engine;
  ig_options ig;
};

struct cohort_cell_error {
  std::string method;
  std::size_t row = 0;
  std::string message;
};

struct method_scores {
  std::string method;  // label
  double tau = 0.0;
  // scores[f][e]: feature f's score at explicand e; NaN where the cell errored.
  std::vector<std::vector<double>> scores;
};

struct cohort_report {
  std::vector<std::string> features;
  std::vector<std::size_t> rows;  // dataset row indices, in run order
  std::uint64_t seed = 0;
  std::string baseline_note;
  std::vector<method_scores> methods;
  std::vector<cohort_cell_error> errors;
};

// Five-number summary. Quartiles interpolate linearly between order
// statistics at rank (n-1)*p (the same convention across CSV/JSON/SVG).
struct five_number_summary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// NaN entries are dropped; throws argument_error when nothing remains.
five_number_summary summarize(std::vector<double> values);

// Weight-averaged value of each column, in dataset feature order.
feature_vector weighted_column_means(const dataset& data);

cohort_report attribute_cohort(const model_ptr& f, const dataset& data,
                               const cohort_options& options);

// Writes <out_dir>/<method-label>.<format> for each method and requested
// format in {"csv", "json", "svg"}. Returns the written paths; an empty
// method list writes nothing and leaves a warning.
struct emitted_files {
  std::vector<std::string> written;
  std::vector<std::string> warnings;
};

emitted_files emit_report(const cohort_report& report, const std::string& out_dir,
                          const std::vector<std::string>& formats);

}  // namespace shapkit

#endif  // SHAPKIT_REPORT_HPP_
