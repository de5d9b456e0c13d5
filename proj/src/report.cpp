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

#include "shapkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shapkit/distribution.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/pms.hpp"
#include "shapkit/rng.hpp"

namespace shapkit {

namespace {

std::string format_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", tau);
  return buf;
}

// %.17g round-trips doubles exactly; used for raw score output.
std::string format_score(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Short fixed-precision form for plot geometry and labels. Using snprintf
// keeps the SVG byte-identical across runs and standard libraries.
std::string format_plot(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<std::size_t> pick_rows(const dataset& data, const cohort_options& options) {
  if (!options.rows.empty()) {
    std::set<std::size_t> seen;
    for (std::size_t r : options.rows) {
      if (r >= data.row_count())
        throw argument_error("explicand row " + std::to_string(r) + " is out of range (dataset has " +
                             std::to_string(data.row_count()) + " rows)");
      if (!seen.insert(r).second)
        throw argument_error("explicand row " + std::to_string(r) + " is listed twice");
    }
    return options.rows;
  }
  std::vector<std::size_t> all(data.row_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  rng_stream stream(options.seed);
  stream.shuffle(all);
  const std::size_t k = std::min<std::size_t>(options.sample_count, all.size());
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

attribution run_cell(const model_ptr& f, const feature_vector& x, const feature_vector& means,
                     const dataset& data, const cohort_method& method,
                     const cohort_options& options) {
  if (method.kind == "bshap") return bshap(f, x, means, options.engine);
  if (method.kind == "ces_empirical")
    return ces_empirical(f, x, data, method.tau, options.engine);
  if (method.kind == "rbshap")
    return rbshap(f, x, discrete_distribution::empirical(data), options.engine);
  if (method.kind == "ig") return ig(f, x, means, options.ig);
  if (method.kind == "pms") return pms(f, x, means, possibility_predicate::always_possible());
  throw argument_error("unknown cohort method '" + method.kind +
                       "', expected bshap, ces_empirical, rbshap, ig, or pms");
}

struct feature_box {
  std::string feature;
  std::optional<five_number_summary> summary;  // empty when no finite scores
};

std::string render_box_plot(const method_scores& method, const std::vector<std::string>& features) {
  std::vector<feature_box> boxes;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < features.size(); ++i) {
    feature_box box{features[i], std::nullopt};
    std::vector<double> finite;
    for (double v : method.scores[i])
      if (std::isfinite(v)) finite.push_back(v);
    if (!finite.empty()) {
      box.summary = summarize(std::move(finite));
      lo = std::min(lo, box.summary->min);
      hi = std::max(hi, box.summary->max);
    }
    boxes.push_back(std::move(box));
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::abs(hi)) * 0.5;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }

  const double slot = 64.0;
  const double margin_left = 72.0;
  const double margin_right = 16.0;
  const double top = 28.0;
  const double bottom = 320.0;
  const double width = margin_left + slot * static_cast<double>(boxes.size()) + margin_right;
  const double height = 360.0;
  const auto y_of = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_plot(width) << " "
      << format_plot(height) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<!-- shapkit cohort plot v1 -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << format_plot(width) << "\" height=\""
      << format_plot(height) << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << format_plot(margin_left) << "\" y=\"16\" font-size=\"12\">" << method.method
      << "</text>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << format_plot(margin_left - 6) << "\" y1=\"" << format_plot(y)
        << "\" x2=\"" << format_plot(width - margin_right) << "\" y2=\"" << format_plot(y)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << format_plot(margin_left - 10) << "\" y=\"" << format_plot(y + 3)
        << "\" text-anchor=\"end\">" << format_plot(v) << "</text>\n";
  }

  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double cx = margin_left + slot * (static_cast<double>(i) + 0.5);
    svg << "<text x=\"" << format_plot(cx) << "\" y=\"" << format_plot(bottom + 16)
        << "\" text-anchor=\"middle\">" << boxes[i].feature << "</text>\n";
    if (!boxes[i].summary) {
      svg << "<text x=\"" << format_plot(cx) << "\" y=\"" << format_plot((top + bottom) / 2)
          << "\" text-anchor=\"middle\" fill=\"#aa3333\">n/a</text>\n";
      continue;
    }
    const auto& s = *boxes[i].summary;
    const double half = slot * 0.3;
    const double yq1 = y_of(s.q1), yq3 = y_of(s.q3), ymed = y_of(s.median);
    const double ymin = y_of(s.min), ymax = y_of(s.max);
    svg << "<line x1=\"" << format_plot(cx) << "\" y1=\"" << format_plot(ymin) << "\" x2=\""
        << format_plot(cx) << "\" y2=\"" << format_plot(ymax) << "\" stroke=\"#555555\"/>\n";
    for (double yw : {ymin, ymax})
      svg << "<line x1=\"" << format_plot(cx - half * 0.6) << "\" y1=\"" << format_plot(yw)
          << "\" x2=\"" << format_plot(cx + half * 0.6) << "\" y2=\"" << format_plot(yw)
          << "\" stroke=\"#555555\"/>\n";
    svg << "<rect x=\"" << format_plot(cx - half) << "\" y=\"" << format_plot(yq3) << "\" width=\""
        << format_plot(half * 2) << "\" height=\"" << format_plot(std::max(yq1 - yq3, 0.5))
        << "\" fill=\"#9ecae9\" stroke=\"#31708f\"/>\n";
    svg << "<line x1=\"" << format_plot(cx - half) << "\" y1=\"" << format_plot(ymed) << "\" x2=\""
        << format_plot(cx + half) << "\" y2=\"" << format_plot(ymed)
        << "\" stroke=\"#31708f\" stroke-width=\"2\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << body;
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string cohort_method::label() const {
  if (kind == "ces_empirical") return kind + "-tau" + format_tau(tau);
  return kind;
}

feature_vector weighted_column_means(const dataset& data) {
  const auto& names = data.feature_names();
  std::vector<double> sums(names.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < data.row_count(); ++i) {
    const double w = data.weight(i);
    const auto& row = data.raw_rows()[i];
    for (std::size_t j = 0; j < names.size(); ++j) sums[j] += w * row[j];
    total += w;
  }
  if (total <= 0.0) throw argument_error("column means need positive total weight");
  for (auto& s : sums) s /= total;
  return feature_vector(names, sums);
}

five_number_summary summarize(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) throw argument_error("summarize needs at least one finite value");
  std::sort(values.begin(), values.end());
  const auto at = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

cohort_report attribute_cohort(const model_ptr& f, const dataset& data,
                               const cohort_options& options) {
  if (!f) throw argument_error("attribute_cohort needs a model");
  cohort_report report;
  report.features = data.feature_names();
  report.rows = pick_rows(data, options);
  report.seed = options.seed;

  const feature_vector means = weighted_column_means(data);
  report.baseline_note = "weighted column means of the cohort data";

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& method : options.methods) {
    method_scores ms;
    ms.method = method.label();
    ms.tau = method.tau;
    ms.scores.assign(report.features.size(), std::vector<double>(report.rows.size(), nan));
    for (std::size_t e = 0; e < report.rows.size(); ++e) {
      const feature_vector x = data.row(report.rows[e]);
      try {
        const attribution a = run_cell(f, x, means, data, method, options);
        for (std::size_t i = 0; i < report.features.size(); ++i)
          ms.scores[i][e] = a.score(report.features[i]);
      } catch (const std::exception& ex) {
        report.errors.push_back({ms.method, report.rows[e], ex.what()});
      }
    }
    report.methods.push_back(std::move(ms));
  }
  return report;
}

emitted_files emit_report(const cohort_report& report, const std::string& out_dir,
                          const std::vector<std::string>& formats) {
  emitted_files out;
  if (report.methods.empty()) {
    out.warnings.push_back("no attribution methods were requested, nothing to write");
    return out;
  }
  for (const auto& fmt : formats)
    if (fmt != "csv" && fmt != "json" && fmt != "svg")
      throw argument_error("unknown report format '" + fmt + "', expected csv, json, or svg");

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  for (const auto& method : report.methods) {
    for (const auto& fmt : formats) {
      const std::filesystem::path path = dir / (method.method + "." + fmt);
      if (fmt == "csv") {
        std::ostringstream csv;
        csv << "method,explicand_row,feature,score\n";
        for (std::size_t e = 0; e < report.rows.size(); ++e)
          for (std::size_t i = 0; i < report.features.size(); ++i)
            csv << method.method << "," << report.rows[e] << "," << report.features[i] << ","
                << format_score(method.scores[i][e]) << "\n";
        write_text_file(path, csv.str());
      } else if (fmt == "json") {
        nlohmann::ordered_json doc;
        doc["method"] = method.method;
        if (method.method.rfind("ces_empirical", 0) == 0) doc["tau"] = method.tau;
        doc["seed"] = report.seed;
        doc["explicand_rows"] = report.rows;
        doc["features"] = report.features;
        doc["baseline"] = report.baseline_note;
        nlohmann::ordered_json summaries = nlohmann::ordered_json::object();
        nlohmann::ordered_json scores = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < report.features.size(); ++i) {
          std::vector<double> finite;
          for (double v : method.scores[i])
            if (std::isfinite(v)) finite.push_back(v);
          if (!finite.empty()) {
            const auto s = summarize(std::move(finite));
            summaries[report.features[i]] = {
                {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
          } else {
            summaries[report.features[i]] = nullptr;
          }
          nlohmann::ordered_json column = nlohmann::ordered_json::array();
          for (double v : method.scores[i]) {
            if (std::isnan(v))
              column.push_back(nullptr);
            else
              column.push_back(v);
          }
          scores[report.features[i]] = std::move(column);
        }
        doc["summaries"] = std::move(summaries);
        doc["scores"] = std::move(scores);
        nlohmann::ordered_json errors = nlohmann::ordered_json::array();
        for (const auto& err : report.errors)
          if (err.method == method.method)
            errors.push_back({{"explicand_row", err.row}, {"message", err.message}});
        if (!errors.empty()) doc["errors"] = std::move(errors);
        write_text_file(path, doc.dump(2) + "\n");
      } else {
        write_text_file(path, render_box_plot(method, report.features));
      }
      out.written.push_back(path.string());
    }
  }
  return out;
}

}  // namespace shapkit
