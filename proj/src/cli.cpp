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

#include "shapkit/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapkit/axioms.hpp"
#include "shapkit/csv_io.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/json_io.hpp"
#include "shapkit/methods.hpp"
#include "shapkit/pms.hpp"
#include "shapkit/report.hpp"
#include "shapkit/scenarios.hpp"

namespace shapkit {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, sep)) parts.push_back(cell);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& cell, const std::string& what) {
  const std::string t = trim(cell);
  double out = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw argument_error(what + " has a non-numeric value '" + cell + "'");
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// "x=5,y=1" binds by name; "5,1" binds positionally to `order`.
feature_vector parse_point(const std::string& text, const std::vector<std::string>& order,
                           const std::string& what) {
  const auto cells = split(text, ',');
  if (cells.empty()) throw argument_error(what + " is empty");
  if (text.find('=') != std::string::npos) {
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& cell : cells) {
      const auto eq = cell.find('=');
      if (eq == std::string::npos)
        throw argument_error(what + " mixes name=value pairs with bare values in '" + cell + "'");
      names.push_back(trim(cell.substr(0, eq)));
      values.push_back(parse_number(cell.substr(eq + 1), what));
      if (names.back().empty()) throw argument_error(what + " has an empty feature name");
    }
    return feature_vector(names, values);
  }
  if (cells.size() != order.size())
    throw argument_error(what + " lists " + std::to_string(cells.size()) +
                         " values but needs one per feature: " + join(order, ", "));
  std::vector<double> values;
  values.reserve(cells.size());
  for (const auto& cell : cells) values.push_back(parse_number(cell, what));
  return feature_vector(order, values);
}

/// "zeros", "means" (column means of --data), bare values, or name=value.
feature_vector resolve_baseline(const std::string& spec, const feature_vector& x,
                                const std::optional<dataset>& data) {
  if (spec.empty() || spec == "zeros")
    return feature_vector(x.names(), std::vector<double>(x.size(), 0.0));
  if (spec == "means") {
    if (!data) throw argument_error("--baseline means needs --data");
    const feature_vector means = weighted_column_means(*data);
    std::vector<double> values;
    for (const auto& name : x.names()) values.push_back(means.get(name));
    return feature_vector(x.names(), values);
  }
  return parse_point(spec, x.names(), "baseline");
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string attribution_to_text(const attribution& a) {
  std::ostringstream out;
  out << "method: " << a.method << "\n";
  if (!a.baseline_note.empty()) out << "baseline: " << a.baseline_note << "\n";
  if (!a.distribution_note.empty()) out << "distribution: " << a.distribution_note << "\n";
  if (a.sample_count > 0) {
    out << "samples: " << a.sample_count;
    if (a.seed) out << " (seed " << *a.seed << ")";
    out << "\n";
  }
  std::size_t width = 3;
  for (const auto& name : a.features) width = std::max(width, name.size());
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    out << a.features[i] << std::string(width - a.features[i].size() + 2, ' ')
        << format_value(a.scores[i]) << "\n";
  }
  out << "sum" << std::string(width - 1, ' ') << format_value(a.sum()) << "\n";
  return out.str();
}

void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + out_path + "' for writing");
  out << body;
  if (!out) throw io_error("failed writing '" + out_path + "'");
}

struct attribute_args {
  std::string model_path;
  std::string method = "bshap";
  std::string explicand_text;
  std::string baseline_text;
  std::string data_path;
  std::string dist_path;
  std::string poss_path;
  double smoothing = 0.0;
  std::size_t steps = 300;
  std::size_t perms = 0;
  std::uint64_t seed = 0;
  std::size_t micro_m = 4;
  std::string out_path;
  std::string format = "json";
};

int run_attribute(const attribute_args& args) {
  const model_ptr f = load_model(args.model_path);
  const std::vector<std::string> order = f->referenced_features();
  const feature_vector x = parse_point(args.explicand_text, order, "explicand");

  std::optional<dataset> data;
  if (!args.data_path.empty()) data = load_csv_dataset(args.data_path);
  std::optional<discrete_distribution> dist;
  if (!args.dist_path.empty()) dist = load_distribution(args.dist_path);

  attribution result;
  if (args.method == "pms") {
    const feature_vector baseline = resolve_baseline(args.baseline_text, x, data);
    const possibility_predicate poss = args.poss_path.empty()
                                           ? possibility_predicate::always_possible()
                                           : load_possibility(args.poss_path);
    sampling_options sampling;
    if (args.perms > 0) sampling = {args.perms, args.seed, false};
    result = pms(f, x, baseline, poss, sampling);
  } else {
    attribution_request request;
    request.f = f;
    request.explicand = x;
    request.method = args.method;
    request.ig.steps = args.steps;
    request.smoothing_tau = args.smoothing;
    request.micro_m = args.micro_m;
    if (args.perms > 0) request.sampling = sampling_options{args.perms, args.seed, false};
    if (args.method == "bshap" || args.method == "ig" || args.method == "micro")
      request.baseline = resolve_baseline(args.baseline_text, x, data);
    if (args.method == "rbshap" || args.method == "ces") {
      if (dist)
        request.dist = dist;
      else if (data)
        request.dist = discrete_distribution::empirical(*data);
      else
        throw argument_error("method " + args.method + " needs --dist or --data");
    }
    if (args.method == "ces_empirical") {
      if (!data) throw argument_error("method ces_empirical needs --data");
      request.data = data;
    }
    result = run_attribution(request);
  }

  emit(args.format == "json" ? attribution_to_json(result) : attribution_to_text(result),
       args.out_path);
  return 0;
}

struct cohort_args {
  std::string model_path;
  std::string data_path;
  std::vector<std::string> methods = {"bshap", "ces_empirical", "rbshap", "ig", "pms"};
  std::vector<double> taus = {0.0, 0.1, 0.2};
  std::uint64_t seed = 20260801;
  std::size_t count = 20;
  std::string rows_text;
  std::string out_dir = "cohort_report";
  std::vector<std::string> formats = {"csv", "json", "svg"};
};

int run_cohort(const cohort_args& args) {
  const model_ptr f = load_model(args.model_path);
  const dataset data = load_csv_dataset(args.data_path);

  cohort_options options;
  options.seed = args.seed;
  options.sample_count = args.count;
  if (!args.rows_text.empty()) {
    for (const auto& cell : split(args.rows_text, ',')) {
      const double v = parse_number(cell, "--rows");
      if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw argument_error("--rows has a non-integer index '" + cell + "'");
      options.rows.push_back(static_cast<std::size_t>(v));
    }
  }
  for (const auto& kind : args.methods) {
    if (kind == "ces_empirical") {
      for (double tau : args.taus) options.methods.push_back({kind, tau});
    } else {
      options.methods.push_back({kind, 0.0});
    }
  }

  const cohort_report report = attribute_cohort(f, data, options);
  const emitted_files files = emit_report(report, args.out_dir, args.formats);
  for (const auto& warning : files.warnings) std::cerr << "warning: " << warning << "\n";
  for (const auto& path : files.written) std::cout << path << "\n";
  for (const auto& err : report.errors)
    std::cerr << "warning: " << err.method << " failed on row " << err.row << ": " << err.message
              << "\n";
  return 0;
}

int run_scenarios(const std::string& name, const std::string& golden_path,
                  const std::string& format) {
  std::vector<std::string> names;
  if (name == "all")
    names = scenario_names();
  else
    names.push_back(name);

  bool all_pass = true;
  nlohmann::ordered_json docs = nlohmann::ordered_json::array();
  for (const auto& n : names) {
    const scenario_report report = run_scenario(n, golden_path);
    all_pass = all_pass && report.pass;
    if (format == "json")
      docs.push_back(nlohmann::ordered_json::parse(scenario_report_to_json(report)));
    else
      std::cout << scenario_report_to_text(report) << "\n";
  }
  if (format == "json") {
    if (name == "all")
      std::cout << docs.dump(2) << "\n";
    else
      std::cout << docs.front().dump(2) << "\n";
  }
  return all_pass ? 0 : 1;
}

int run_check(const std::string& axiom, const std::string& method, const std::string& instance,
              const std::string& format) {
  const axiom_check check = make_axiom_instance(instance, axiom_from_name(axiom), method);
  const axiom_report report = check_axiom(check);
  if (format == "json")
    std::cout << axiom_report_to_json(report);
  else
    std::cout << axiom_report_to_text(report);
  return report.pass ? 0 : 1;
}

int run_oracle(const std::string& out_path, double gate) {
  try {
    const std::size_t count = write_golden_file(out_path, gate);
    std::cout << "wrote " << count << " golden entries to " << out_path << "\n";
    return 0;
  } catch (const io_error&) {
    throw;
  } catch (const argument_error&) {
    throw;
  } catch (const error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Feature attribution engine and verification harness"};
  app.require_subcommand(1);

  attribute_args attr;
  auto* attribute = app.add_subcommand("attribute", "Attribute one prediction to its features");
  attribute->add_option("--model", attr.model_path, "Model JSON file")->required();
  attribute
      ->add_option("--method", attr.method,
                   "bshap | rbshap | ces | ces_empirical | ig | micro | pms")
      ->check(CLI::IsMember({"bshap", "rbshap", "ces", "ces_empirical", "ig", "micro", "pms"}));
  attribute
      ->add_option("--explicand", attr.explicand_text,
                   "Point to explain: 'x=5,y=1' or bare values in model feature order")
      ->required();
  attribute->add_option("--baseline", attr.baseline_text,
                        "zeros (default) | means | values | name=value list");
  attribute->add_option("--data", attr.data_path, "CSV dataset (ces_empirical, baseline means)");
  attribute->add_option("--dist", attr.dist_path, "Distribution JSON file (rbshap, ces)");
  attribute->add_option("--possibility", attr.poss_path, "Possibility JSON file (pms)");
  attribute->add_option("--smoothing", attr.smoothing, "Row-agreement tau for ces_empirical");
  attribute->add_option("--steps", attr.steps, "Integration steps for ig");
  attribute->add_option("--perms", attr.perms, "Sample this many permutations instead of exact");
  attribute->add_option("--seed", attr.seed, "Sampling seed");
  attribute->add_option("--micro-m", attr.micro_m, "Micro features per feature for micro");
  attribute->add_option("--out", attr.out_path, "Output file (default stdout)");
  attribute->add_option("--format", attr.format, "json | text")
      ->check(CLI::IsMember({"json", "text"}));

  cohort_args coh;
  auto* cohort = app.add_subcommand("cohort", "Attribute many dataset rows and write reports");
  cohort->add_option("--model", coh.model_path, "Model JSON file")->required();
  cohort->add_option("--data", coh.data_path, "CSV dataset")->required();
  cohort
      ->add_option("--method", coh.methods,
                   "Methods to run (default: bshap,ces_empirical,rbshap,ig,pms)")
      ->delimiter(',')
      ->expected(0, 32);
  cohort->add_option("--smoothing", coh.taus, "ces_empirical taus (default: 0,0.1,0.2)")
      ->delimiter(',');
  cohort->add_option("--seed", coh.seed, "Explicand sampling seed");
  cohort->add_option("--count", coh.count, "Explicand sample size (default 20)");
  cohort->add_option("--rows", coh.rows_text, "Explicit explicand row indices, e.g. 3,17,41");
  cohort->add_option("--out", coh.out_dir, "Output directory (default cohort_report)")
      ->envname("SHAPKIT_OUT_DIR");
  cohort->add_option("--format", coh.formats, "Any of csv,json,svg (default all three)")
      ->delimiter(',');

  std::string scenario_name;
  std::string golden_path = "data/scenarios_golden.json";
  std::string scenario_format = "text";
  auto* scenario = app.add_subcommand("scenario", "Replay named scenarios against golden values");
  scenario->add_option("name", scenario_name, "Scenario name, or 'all'")->required();
  scenario->add_option("--golden", golden_path, "Golden value file");
  scenario->add_option("--format", scenario_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string check_axiom_name;
  std::string check_method;
  std::string check_instance;
  std::string check_format = "text";
  auto* check = app.add_subcommand("check", "Check one axiom for a method on a named instance");
  check
      ->add_option("axiom", check_axiom_name,
                   "dummy | efficiency | linearity | symmetry | asi | demand_monotonicity | "
                   "proportionality | strong_monotonicity")
      ->required();
  check->add_option("--method", check_method, "Attribution method to check")->required();
  check->add_option("--instance", check_instance, "Named instance")->required();
  check->add_option("--format", check_format, "text | json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string oracle_out = "data/scenarios_golden.json";
  double oracle_gate = 1e-9;
  auto* oracle = app.add_subcommand(
      "oracle", "Recompute golden values by brute force and rewrite the golden file");
  oracle->add_option("--out", oracle_out, "Golden file to write");
  oracle->add_option("--gate", oracle_gate, "Max engine-vs-oracle gap tolerated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (attribute->parsed()) return run_attribute(attr);
    if (cohort->parsed()) return run_cohort(coh);
    if (scenario->parsed()) return run_scenarios(scenario_name, golden_path, scenario_format);
    if (check->parsed())
      return run_check(check_axiom_name, check_method, check_instance, check_format);
    if (oracle->parsed()) return run_oracle(oracle_out, oracle_gate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace shapkit
