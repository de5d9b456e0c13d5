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

// JSON readers for models, distributions, and possibility predicates, plus
// JSON writers for run results. Shapes:
//
//   model:        {"type": "linear" | "expression" | "tree_ensemble" |
//                  "table" | "sum" | "affine_reparam" | "layered", ...}
//   distribution: {"type": "explicit", "rows": [{"values": {...}, "prob": p}]}
//                 {"type": "independent",
//                  "marginals": {feature: [{"value": v, "prob": p}, ...]}}
//   possibility:  {"type": "expression", "expr": "..."}
//                 {"type": "allowed_rows", "rows": [{feature: value, ...}]}

#ifndef SHAPKIT_JSON_IO_HPP_
#define SHAPKIT_JSON_IO_HPP_

#include <string>

#include "shapkit/axioms.hpp"
#include "shapkit/distribution.hpp"
#include "shapkit/model.hpp"
#include "shapkit/pms.hpp"
#include "shapkit/scenarios.hpp"
#include "shapkit/shapley.hpp"

namespace shapkit {

model_ptr parse_model_json(const std::string& text);
model_ptr load_model(const std::string& path);

discrete_distribution parse_distribution_json(const std::string& text);
discrete_distribution load_distribution(const std::string& path);

possibility_predicate parse_possibility_json(const std::string& text);
possibility_predicate load_possibility(const std::string& path);

// Feature vector as a flat JSON object {feature: value, ...}.
feature_vector parse_feature_vector_json(const std::string& text);

// Scores as {feature: score} plus a metadata block.
std::string attribution_to_json(const attribution& a);

std::string axiom_report_to_json(const axiom_report& report);
std::string scenario_report_to_json(const scenario_report& report);

// Fixed-width plain-text table of a scenario report.
std::string scenario_report_to_text(const scenario_report& report);
std::string axiom_report_to_text(const axiom_report& report);

}  // namespace shapkit

#endif  // SHAPKIT_JSON_IO_HPP_
