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

#include "shapkit/json_io.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shapkit/errors.hpp"

namespace shapkit {
namespace {

// Insertion-ordered documents keep author-declared feature order stable.
using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(what + ": " + e.what());
  }
}

const json& require_field(const json& doc, const char* field,
                          const std::string& context) {
  const auto it = doc.find(field);
  if (it == doc.end()) {
    throw parse_error(context + ": missing field '" + std::string(field) + "'");
  }
  return *it;
}

double number_field(const json& doc, const char* field,
                    const std::string& context) {
  const json& v = require_field(doc, field, context);
  if (!v.is_number()) {
    throw parse_error(context + ": field '" + std::string(field) +
                      "' must be a number");
  }
  return v.get<double>();
}

feature_vector vector_from_object(const json& obj, const std::string& context) {
  if (!obj.is_object()) throw parse_error(context + ": expected an object");
  feature_vector out;
  for (const auto& [name, value] : obj.items()) {
    if (!value.is_number()) {
      throw parse_error(context + ": value of '" + name + "' must be a number");
    }
    out.set(name, value.get<double>());
  }
  return out;
}

model_ptr model_from_document(const json& doc, const std::string& context);

decision_tree tree_from_document(const json& doc, const std::string& context) {
  decision_tree tree;
  tree.weight = doc.contains("weight") ? number_field(doc, "weight", context) : 1.0;
  const json& nodes = require_field(doc, "nodes", context);
  if (!nodes.is_array() || nodes.empty()) {
    throw parse_error(context + ": 'nodes' must be a non-empty array");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string node_context = context + ", node " + std::to_string(i);
    const json& n = nodes[i];
    tree_node node;
    if (n.contains("feature")) {
      node.feature = require_field(n, "feature", node_context).get<std::string>();
      node.threshold = number_field(n, "threshold", node_context);
      node.left = static_cast<std::size_t>(number_field(n, "left", node_context));
      node.right = static_cast<std::size_t>(number_field(n, "right", node_context));
      if (node.left >= nodes.size() || node.right >= nodes.size()) {
        throw parse_error(node_context + ": child index out of range");
      }
    } else {
      node.value = number_field(n, "value", node_context);
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

model_ptr model_from_document(const json& doc, const std::string& context) {
  if (!doc.is_object()) throw parse_error(context + ": expected an object");
  const std::string type =
      require_field(doc, "type", context).get<std::string>();

  if (type == "linear") {
    const json& coeffs = require_field(doc, "coefficients", context);
    if (!coeffs.is_object()) {
      throw parse_error(context + ": 'coefficients' must be an object");
    }
    std::vector<std::pair<std::string, double>> pairs;
    for (const auto& [name, value] : coeffs.items()) {
      if (!value.is_number()) {
        throw parse_error(context + ": coefficient of '" + name +
                          "' must be a number");
      }
      pairs.push_back({name, value.get<double>()});
    }
    const double intercept =
        doc.contains("intercept") ? number_field(doc, "intercept", context) : 0.0;
    return std::make_shared<linear_model>(intercept, std::move(pairs));
  }

  if (type == "expression") {
    const std::string source =
        require_field(doc, "source", context).get<std::string>();
    std::optional<std::vector<std::string>> features;
    if (doc.contains("features")) {
      features = doc["features"].get<std::vector<std::string>>();
    }
    try {
      return std::make_shared<expression_model>(source, features);
    } catch (const parse_error& e) {
      throw parse_error(context + ": " + e.what());
    }
  }

  if (type == "tree_ensemble") {
    const json& trees = require_field(doc, "trees", context);
    if (!trees.is_array() || trees.empty()) {
      throw parse_error(context + ": 'trees' must be a non-empty array");
    }
    std::vector<decision_tree> parsed;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      parsed.push_back(
          tree_from_document(trees[i], context + ", tree " + std::to_string(i)));
    }
    return std::make_shared<tree_ensemble_model>(std::move(parsed));
  }

  if (type == "table") {
    const json& rows = require_field(doc, "rows", context);
    if (!rows.is_array()) throw parse_error(context + ": 'rows' must be an array");
    std::vector<std::pair<feature_vector, double>> parsed;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string row_context = context + ", row " + std::to_string(i);
      const json& row = rows[i];
      parsed.push_back(
          {vector_from_object(require_field(row, "values", row_context), row_context),
           number_field(row, "value", row_context)});
    }
    std::optional<double> default_value;
    if (doc.contains("default")) {
      default_value = number_field(doc, "default", context);
    }
    return std::make_shared<lookup_table_model>(std::move(parsed), default_value);
  }

  if (type == "sum") {
    const json& terms = require_field(doc, "terms", context);
    if (!terms.is_array() || terms.empty()) {
      throw parse_error(context + ": 'terms' must be a non-empty array");
    }
    std::vector<std::pair<double, model_ptr>> children;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string term_context = context + ", term " + std::to_string(i);
      const json& term = terms[i];
      const double weight =
          term.contains("weight") ? number_field(term, "weight", term_context) : 1.0;
      children.push_back({weight, model_from_document(
                                      require_field(term, "model", term_context),
                                      term_context)});
    }
    return std::make_shared<sum_model>(std::move(children));
  }

  if (type == "affine_reparam") {
    model_ptr child =
        model_from_document(require_field(doc, "model", context), context);
    const std::string feature =
        require_field(doc, "feature", context).get<std::string>();
    const double scale = number_field(doc, "scale", context);
    const double shift = number_field(doc, "shift", context);
    return std::make_shared<affine_reparam_model>(std::move(child), feature,
                                                  scale, shift);
  }

  if (type == "layered") {
    model_ptr outer =
        model_from_document(require_field(doc, "outer", context), context);
    const json& inner = require_field(doc, "inner", context);
    if (!inner.is_array() || inner.empty()) {
      throw parse_error(context + ": 'inner' must be a non-empty array");
    }
    std::vector<std::pair<std::string, model_ptr>> nodes;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const std::string node_context = context + ", inner " + std::to_string(i);
      const json& node = inner[i];
      nodes.push_back(
          {require_field(node, "name", node_context).get<std::string>(),
           model_from_document(require_field(node, "model", node_context),
                               node_context)});
    }
    return std::make_shared<layered_model>(std::move(outer), std::move(nodes));
  }

  throw parse_error(context + ": unknown model type '" + type + "'");
}

}  // namespace

model_ptr parse_model_json(const std::string& text) {
  return model_from_document(parse_document(text, "model"), "model");
}

model_ptr load_model(const std::string& path) {
  return model_from_document(parse_document(read_file(path), path), path);
}

namespace {

discrete_distribution distribution_from_document(const json& doc,
                                                 const std::string& context) {
  if (!doc.is_object()) throw parse_error(context + ": expected an object");
  const std::string type =
      require_field(doc, "type", context).get<std::string>();

  if (type == "explicit") {
    const json& rows = require_field(doc, "rows", context);
    if (!rows.is_array() || rows.empty()) {
      throw parse_error(context + ": 'rows' must be a non-empty array");
    }
    std::vector<std::pair<feature_vector, double>> atoms;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string row_context = context + ", row " + std::to_string(i);
      const json& row = rows[i];
      atoms.push_back(
          {vector_from_object(require_field(row, "values", row_context), row_context),
           number_field(row, "prob", row_context)});
    }
    return discrete_distribution::from_atoms(std::move(atoms));
  }

  if (type == "independent") {
    const json& marginals = require_field(doc, "marginals", context);
    if (!marginals.is_object() || marginals.empty()) {
      throw parse_error(context + ": 'marginals' must be a non-empty object");
    }
    std::vector<feature_marginal> parsed;
    for (const auto& [feature, atoms] : marginals.items()) {
      if (!atoms.is_array() || atoms.empty()) {
        throw parse_error(context + ": marginal of '" + feature +
                          "' must be a non-empty array");
      }
      feature_marginal m;
      m.feature = feature;
      for (const auto& atom : atoms) {
        m.atoms.push_back({number_field(atom, "value", context + ", '" + feature + "'"),
                           number_field(atom, "prob", context + ", '" + feature + "'")});
      }
      parsed.push_back(std::move(m));
    }
    return discrete_distribution::independent(std::move(parsed));
  }

  throw parse_error(context + ": unknown distribution type '" + type + "'");
}

possibility_predicate possibility_from_document(const json& doc,
                                                const std::string& context) {
  if (!doc.is_object()) throw parse_error(context + ": expected an object");
  const std::string type =
      require_field(doc, "type", context).get<std::string>();
  if (type == "expression") {
    const std::string expr =
        require_field(doc, "expr", context).get<std::string>();
    try {
      return possibility_predicate::from_expression(expr);
    } catch (const parse_error& e) {
      throw parse_error(context + ": " + e.what());
    }
  }
  if (type == "allowed_rows") {
    const json& rows = require_field(doc, "rows", context);
    if (!rows.is_array() || rows.empty()) {
      throw parse_error(context + ": 'rows' must be a non-empty array");
    }
    std::vector<feature_vector> parsed;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      parsed.push_back(
          vector_from_object(rows[i], context + ", row " + std::to_string(i)));
    }
    return possibility_predicate::from_allowed_rows(std::move(parsed));
  }
  throw parse_error(context + ": unknown possibility type '" + type + "'");
}

}  // namespace

discrete_distribution parse_distribution_json(const std::string& text) {
  return distribution_from_document(parse_document(text, "distribution"),
                                    "distribution");
}

discrete_distribution load_distribution(const std::string& path) {
  return distribution_from_document(parse_document(read_file(path), path), path);
}

possibility_predicate parse_possibility_json(const std::string& text) {
  return possibility_from_document(parse_document(text, "possibility"),
                                   "possibility");
}

possibility_predicate load_possibility(const std::string& path) {
  return possibility_from_document(parse_document(read_file(path), path), path);
}

feature_vector parse_feature_vector_json(const std::string& text) {
  return vector_from_object(parse_document(text, "feature vector"),
                            "feature vector");
}

std::string attribution_to_json(const attribution& a) {
  json scores = json::object();
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    scores[a.features[i]] = a.scores[i];
  }
  json meta;
  meta["method"] = a.method;
  if (!a.baseline_note.empty()) meta["baseline"] = a.baseline_note;
  if (!a.distribution_note.empty()) meta["distribution"] = a.distribution_note;
  if (a.sample_count > 0) meta["sample_count"] = a.sample_count;
  if (a.seed) meta["seed"] = *a.seed;
  meta["sum"] = a.sum();

  json doc;
  doc["scores"] = std::move(scores);
  doc["metadata"] = std::move(meta);
  return doc.dump(2) + "\n";
}

std::string axiom_report_to_json(const axiom_report& report) {
  json doc;
  doc["axiom"] = axiom_name(report.axiom);
  doc["method"] = report.method;
  doc["antecedent_holds"] = report.antecedent_holds;
  doc["antecedent_note"] = report.antecedent_note;
  doc["pass"] = report.pass;
  doc["deviation"] = report.deviation;
  doc["witness"] = report.witness;
  return doc.dump(2) + "\n";
}

std::string scenario_report_to_json(const scenario_report& report) {
  json checks = json::array();
  for (const auto& check : report.checks) {
    json row;
    row["key"] = check.key;
    row["actual"] = check.actual;
    row["expected"] = check.expected;
    row["tol"] = check.tol;
    row["provenance"] = check.provenance;
    row["deviation"] = check.deviation;
    row["pass"] = check.pass;
    checks.push_back(std::move(row));
  }
  json doc;
  doc["scenario"] = report.name;
  doc["pass"] = report.pass;
  doc["checks"] = std::move(checks);
  doc["notes"] = report.notes;
  return doc.dump(2) + "\n";
}

namespace {

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

}  // namespace

std::string scenario_report_to_text(const scenario_report& report) {
  std::size_t key_width = 3;
  for (const auto& check : report.checks) {
    key_width = std::max(key_width, check.key.size());
  }
  std::ostringstream out;
  out << "scenario " << report.name << ": "
      << (report.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& check : report.checks) {
    out << "  " << (check.pass ? "ok  " : "FAIL") << " "
        << std::left << std::setw(static_cast<int>(key_width)) << check.key
        << std::right << "  actual=" << format_number(check.actual)
        << "  expected=" << format_number(check.expected)
        << "  tol=" << format_number(check.tol)
        << "  [" << check.provenance << "]\n";
  }
  for (const auto& note : report.notes) {
    out << "  note: " << note << "\n";
  }
  return out.str();
}

std::string axiom_report_to_text(const axiom_report& report) {
  std::ostringstream out;
  out << "axiom " << axiom_name(report.axiom) << " on method " << report.method
      << ": " << (report.pass ? "PASS" : "FAIL")
      << " (deviation " << format_number(report.deviation) << ")\n";
  out << "  antecedent: "
      << (report.antecedent_holds ? "holds" : "does not hold");
  if (!report.antecedent_note.empty()) out << " (" << report.antecedent_note << ")";
  out << "\n";
  if (!report.witness.empty()) out << "  witness: " << report.witness << "\n";
  return out.str();
}

}  // namespace shapkit
