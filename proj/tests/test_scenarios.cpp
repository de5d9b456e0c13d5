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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "shapkit/errors.hpp"
#include "shapkit/scenarios.hpp"

using namespace shapkit;

namespace {

const std::string kGolden = std::string(SHAPKIT_DATA_DIR) + "/scenarios_golden.json";

bool registered(const std::string& name) {
  const auto& names = scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace

TEST_CASE("the registry lists every scenario") {
  const std::vector<std::string> expected{
      "dummy-failure",
      "linearity-failure",
      "demand-monotonicity-failure",
      "symmetry-failure",
      "strong-monotonicity-failure",
      "marginal-sum-remark",
      "min-remark",
      "cube-remark",
      "young-counterexample",
      "deepshap-order",
      "kahneman",
      "pms-impossible-everywhere",
      "pms-boolean-3",
      "pms-boolean-n",
      "sparsity-equal-split",
      "bshap-as-ces-epsilon",
      "rbshap-equals-ces-independent",
      "micro-convergence",
      "reduction-roundtrip",
  };
  CHECK(scenario_names().size() == expected.size());
  for (const std::string& name : expected) CHECK_MESSAGE(registered(name), name);
}

TEST_CASE("unknown scenario names list the registry") {
  CHECK_THROWS_WITH_AS(build_scenario("not-a-scenario", false),
                       doctest::Contains("min-remark"), lookup_error);
}

TEST_CASE("every scenario builds and carries entries") {
  for (const std::string& name : scenario_names()) {
    CAPTURE(name);
    const scenario_result result = build_scenario(name, false);
    CHECK(result.name == name);
    CHECK(result.entries.size() > 0);
    for (const scenario_entry& entry : result.entries) {
      CAPTURE(entry.key);
      CHECK_FALSE(entry.key.empty());
      // At most one non-oracle golden source per entry, and the engine's
      // actual must already sit within the entry's own tolerance of it.
      const int sources = (entry.pinned ? 1 : 0) + (entry.closed_form ? 1 : 0);
      CHECK(sources <= 1);
      if (sources == 1) CHECK(std::abs(entry.golden() - entry.actual) <= entry.tol);
    }
  }
}

TEST_CASE("scenario builds are deterministic") {
  for (const char* name : {"young-counterexample", "kahneman", "pms-boolean-n"}) {
    CAPTURE(name);
    const scenario_result first = build_scenario(name, false);
    const scenario_result second = build_scenario(name, false);
    REQUIRE(first.entries.size() == second.entries.size());
    for (std::size_t i = 0; i < first.entries.size(); ++i) {
      CHECK(first.entries[i].key == second.entries[i].key);
      CHECK(first.entries[i].actual == second.entries[i].actual);
    }
  }
}

TEST_CASE("all scenarios pass against the checked-in golden file") {
  for (const std::string& name : scenario_names()) {
    CAPTURE(name);
    const scenario_report report = run_scenario(name, kGolden);
    CHECK(report.pass);
    for (const scenario_check& check : report.checks) {
      CAPTURE(check.key);
      CHECK_MESSAGE(check.pass, check.key, ": ", check.actual, " vs ", check.expected);
      CHECK((check.provenance == "pinned" || check.provenance == "closed-form" ||
             check.provenance == "oracle"));
    }
  }
}

TEST_CASE("golden rewrite round trips") {
  const std::filesystem::path tmp =
      std::filesystem::temp_directory_path() / "shapkit_test_golden.json";
  const std::size_t written = write_golden_file(tmp.string(), 1e-9);
  CHECK(written > 0);
  for (const std::string& name : scenario_names()) {
    CAPTURE(name);
    CHECK(run_scenario(name, tmp.string()).pass);
  }
  std::filesystem::remove(tmp);
}

TEST_CASE("running against a missing golden file explains itself") {
  CHECK_THROWS_WITH_AS(run_scenario("min-remark", "/nonexistent/golden.json"),
                       doctest::Contains("golden"), io_error);
}
