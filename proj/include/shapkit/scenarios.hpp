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

// Named, self-contained demonstration scenarios. Each scenario constructs a
// small model/distribution instance in code, runs the relevant attribution
// methods, and produces a list of keyed numeric entries that are compared
// against a golden file. Golden values come in three kinds, recorded per
// entry as `provenance`:
//
//   "pinned"       externally fixed reference constants,
//   "closed-form"  values forced by the construction's arithmetic,
//   "oracle"       values regenerated by brute-force reference code.
//
// `write_golden_file` rebuilds the golden file from scratch: pinned and
// closed-form entries are written from the in-code constants, oracle entries
// from the brute-force oracles, and the engine actuals must agree with every
// oracle value within a gate or the write fails.

#ifndef SHAPKIT_SCENARIOS_HPP_
#define SHAPKIT_SCENARIOS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "shapkit/axioms.hpp"

namespace shapkit {

// One keyed numeric produced by a scenario run.
struct scenario_entry {
  std::string key;
  double actual = 0.0;

  // Exactly one of `pinned` / `closed_form` is set for non-oracle entries;
  // oracle entries fill `oracle_value` only when requested.
  std::optional<double> pinned;
  std::optional<double> closed_form;
  std::optional<double> oracle_value;

  double tol = 1e-9;

  std::string provenance() const {
    if (pinned) return "pinned";
    if (closed_form) return "closed-form";
    return "oracle";
  }
  // Golden value for this entry (oracle entries require a computed oracle).
  double golden() const;
};

// Result of building and running one scenario (before golden comparison).
struct scenario_result {
  std::string name;
  std::vector<scenario_entry> entries;
  std::vector<std::string> notes;
};

// One comparison of an entry against the golden file.
struct scenario_check {
  std::string key;
  double actual = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  std::string provenance;
  double deviation = 0.0;
  bool pass = false;
};

struct scenario_report {
  std::string name;
  std::vector<scenario_check> checks;
  std::vector<std::string> notes;
  bool pass = false;
};

// Registry of scenario names, in canonical order.
const std::vector<std::string>& scenario_names();

// Builds and runs one scenario. `with_oracle` additionally computes the
// brute-force oracle value for every oracle entry (slower).
// Throws lookup_error for unknown names, listing the registry.
scenario_result build_scenario(const std::string& name, bool with_oracle);

// Runs a scenario and compares its entries against the golden file.
scenario_report run_scenario(const std::string& name,
                             const std::string& golden_path);

// Rebuilds the golden file for all scenarios. Oracle entries are checked
// against the engine actuals; any |actual - oracle| > gate aborts the write
// by throwing. Returns the number of entries written.
std::size_t write_golden_file(const std::string& golden_path,
                              double gate = 1e-9);

// Named axiom-check instances for the command line. Each instance bundles a
// concrete model/explicand/distribution; `axiom` and `method` select what to
// check on it. Throws lookup_error for unknown instances.
const std::vector<std::string>& axiom_instance_names();
axiom_check make_axiom_instance(const std::string& instance, axiom_id axiom,
                                const std::string& method);

}  // namespace shapkit

#endif  // SHAPKIT_SCENARIOS_HPP_
