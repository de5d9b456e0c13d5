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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "shapkit/cli.hpp"
#include "shapkit/csv_io.hpp"
#include "shapkit/errors.hpp"
#include "shapkit/json_io.hpp"
#include "shapkit/methods.hpp"
#include "shapkit/report.hpp"

using namespace shapkit;
namespace fs = std::filesystem;

namespace {

feature_vector point(std::initializer_list<std::pair<const char*, double>> entries) {
  feature_vector out;
  for (const auto& [name, value] : entries) out.set(name, value);
  return out;
}

// Scratch directory that cleans up after the test case.
struct temp_dir {
  fs::path path;
  temp_dir()
      : path(fs::temp_directory_path() /
             ("shapkit_io_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~temp_dir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
};

struct cli_run {
  int exit_code = 0;
  std::string out;
};

cli_run run(std::vector<std::string> args) {
  std::vector<const char*> argv;
  argv.push_back("shapkit");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream captured;
  std::streambuf* saved = std::cout.rdbuf(captured.rdbuf());
  cli_run result;
  try {
    result.exit_code = run_cli(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(saved);
    throw;
  }
  std::cout.rdbuf(saved);
  result.out = captured.str();
  return result;
}

const std::string kGolden = std::string(SHAPKIT_DATA_DIR) + "/scenarios_golden.json";

}  // namespace

TEST_CASE("linear model json") {
  const model_ptr f = parse_model_json(
      R"({"type": "linear", "intercept": 154.15,
          "coefficients": {"bmi": 399.0, "bp": 4.9}})");
  CHECK(f->eval(point({{"bmi", 0.1}, {"bp", 2.0}})) ==
        doctest::Approx(154.15 + 39.9 + 9.8).epsilon(1e-12));
}

TEST_CASE("expression model json pins the declared universe") {
  const model_ptr f = parse_model_json(
      R"({"type": "expression", "source": "(x1 + x2) ^ 3",
          "features": ["x1", "x2", "x3"]})");
  CHECK(f->eval(point({{"x1", 5.0}, {"x2", 1.0}, {"x3", 9.0}})) == 216.0);
  CHECK(f->referenced_features() ==
        std::vector<std::string>{"x1", "x2", "x3"});
}

TEST_CASE("tree ensemble json sends threshold ties right") {
  const model_ptr f = parse_model_json(
      R"({"type": "tree_ensemble", "trees": [{
            "nodes": [
              {"feature": "x", "threshold": 2.0, "left": 1, "right": 2},
              {"value": 10.0},
              {"value": 20.0}
            ]}]})");
  CHECK(f->eval(point({{"x", 1.9}})) == 10.0);
  CHECK(f->eval(point({{"x", 2.0}})) == 20.0);
  CHECK(f->eval(point({{"x", 2.1}})) == 20.0);
}

TEST_CASE("lookup table json honors the default") {
  const std::string rows =
      R"("rows": [{"values": {"x": 1.0, "y": 0.0}, "value": 5.0}])";
  const model_ptr with_default =
      parse_model_json(R"({"type": "table", )" + rows + R"(, "default": 9.0})");
  CHECK(with_default->eval(point({{"x", 1.0}, {"y", 0.0}})) == 5.0);
  CHECK(with_default->eval(point({{"x", 3.0}, {"y", 0.0}})) == 9.0);

  const model_ptr bare = parse_model_json(R"({"type": "table", )" + rows + "}");
  CHECK(bare->eval(point({{"x", 1.0}, {"y", 0.0}})) == 5.0);
  CHECK_THROWS_AS(bare->eval(point({{"x", 3.0}, {"y", 0.0}})), lookup_error);
}

TEST_CASE("sum and affine reparam json") {
  const model_ptr f = parse_model_json(
      R"({"type": "sum", "terms": [
            {"weight": 2.0,
             "model": {"type": "expression", "source": "x * y"}},
            {"model": {"type": "linear", "coefficients": {"x": 1.0}}}
          ]})");
  CHECK(f->eval(point({{"x", 3.0}, {"y", 4.0}})) == 27.0);

  const model_ptr reparam = parse_model_json(
      R"({"type": "affine_reparam", "feature": "x",
          "scale": 2.0, "shift": 1.0,
          "model": {"type": "linear", "coefficients": {"x": 2.0}}})");
  // The child sees (x - 1) / 2.
  CHECK(reparam->eval(point({{"x", 7.0}})) == 6.0);
}

TEST_CASE("layered model json") {
  const model_ptr f = parse_model_json(
      R"({"type": "layered",
          "outer": {"type": "expression", "source": "h + z"},
          "inner": [
            {"name": "h", "model": {"type": "expression", "source": "x + y"}},
            {"name": "z", "model": {"type": "expression", "source": "z"}}
          ]})");
  CHECK(f->eval(point({{"x", 1.0}, {"y", 2.0}, {"z", 3.0}})) == 6.0);
}

TEST_CASE("model json rejects unknown types and missing fields") {
  CHECK_THROWS_WITH_AS(parse_model_json(R"({"type": "mystery"})"),
                       doctest::Contains("unknown model type"), parse_error);
  CHECK_THROWS_WITH_AS(parse_model_json(R"({"coefficients": {}})"),
                       doctest::Contains("type"), parse_error);
  CHECK_THROWS_AS(parse_model_json("not json at all"), parse_error);
}

TEST_CASE("distribution json explicit and independent") {
  const discrete_distribution joint = parse_distribution_json(
      R"({"type": "explicit", "rows": [
            {"values": {"x": 0.0, "y": 0.0}, "prob": 0.25},
            {"values": {"x": 1.0, "y": 2.0}, "prob": 0.75}
          ]})");
  CHECK(joint.atom_count() == 2);
  const model_ptr f = parse_model_json(
      R"({"type": "linear", "coefficients": {"x": 1.0, "y": 1.0}})");
  CHECK(joint.expectation(*f) == doctest::Approx(0.75 * 3.0).epsilon(1e-12));

  const discrete_distribution indep = parse_distribution_json(
      R"({"type": "independent", "marginals": {
            "x": [{"value": 0.0, "prob": 0.5}, {"value": 1.0, "prob": 0.5}],
            "y": [{"value": 0.0, "prob": 0.5}, {"value": 2.0, "prob": 0.5}]
          }})");
  CHECK(indep.atom_count() == 4);
  CHECK(indep.expectation(*f) == doctest::Approx(1.5).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(parse_distribution_json(R"({"type": "copula"})"),
                       doctest::Contains("unknown distribution type"), parse_error);
}

TEST_CASE("possibility json expression and allowed rows") {
  const possibility_predicate ordered =
      parse_possibility_json(R"({"type": "expression", "expr": "x <= y"})");
  CHECK(ordered(point({{"x", 1.0}, {"y", 2.0}})));
  CHECK_FALSE(ordered(point({{"x", 2.0}, {"y", 1.0}})));

  const possibility_predicate listed = parse_possibility_json(
      R"({"type": "allowed_rows", "rows": [{"x": 0.0}, {"x": 1.0}]})");
  CHECK(listed(point({{"x", 1.0}})));
  CHECK_FALSE(listed(point({{"x", 0.5}})));

  CHECK_THROWS_AS(parse_possibility_json(R"({"type": "oracle"})"), parse_error);
}

TEST_CASE("feature vector json") {
  const feature_vector x = parse_feature_vector_json(R"({"x": 1.5, "y": -2.0})");
  CHECK(x.get("x") == 1.5);
  CHECK(x.get("y") == -2.0);
  CHECK_THROWS_AS(parse_feature_vector_json(R"({"x": "high"})"), parse_error);
}

TEST_CASE("csv datasets parse with and without weights") {
  std::istringstream plain("x,y\n1,2\n3,4\n");
  const dataset unweighted = parse_csv_dataset(plain, "plain.csv");
  CHECK(unweighted.row_count() == 2);
  CHECK_FALSE(unweighted.has_weights());
  CHECK(unweighted.row(1).get("y") == 4.0);

  std::istringstream weighted_in("weight,x,y\r\n2.5,1,5\r\n");
  const dataset weighted = parse_csv_dataset(weighted_in, "weighted.csv");
  CHECK(weighted.has_weights());
  CHECK(weighted.weight(0) == 2.5);
  CHECK(weighted.row(0).get("x") == 1.0);
  CHECK(weighted.row(0).get("y") == 5.0);
}

TEST_CASE("csv writer round trips") {
  const dataset data({"a", "b"}, {{1.0, 2.5}, {3.0, -4.0}},
                     std::vector<double>{1.0, 0.5});
  std::ostringstream out;
  write_csv_dataset(data, out);
  std::istringstream in(out.str());
  const dataset back = parse_csv_dataset(in, "roundtrip.csv");
  REQUIRE(back.row_count() == data.row_count());
  CHECK(back.has_weights());
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    CHECK(back.weight(r) == data.weight(r));
    CHECK(back.row(r).get("a") == data.row(r).get("a"));
    CHECK(back.row(r).get("b") == data.row(r).get("b"));
  }
}

TEST_CASE("csv errors carry the line number and column") {
  std::istringstream bad_cell("x,y\n1,2\n1,fast\n");
  CHECK_THROWS_WITH_AS(parse_csv_dataset(bad_cell, "data.csv"),
                       doctest::Contains("data.csv:3"), parse_error);
  std::istringstream bad_cell2("x,y\n1,2\n1,fast\n");
  CHECK_THROWS_WITH_AS(parse_csv_dataset(bad_cell2, "data.csv"),
                       doctest::Contains("column 2"), parse_error);

  std::istringstream short_row("x,y\n1\n");
  CHECK_THROWS_WITH_AS(parse_csv_dataset(short_row, "data.csv"),
                       doctest::Contains("expected 2 cells"), parse_error);

  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(parse_csv_dataset(empty, "data.csv"),
                       doctest::Contains("empty file"), parse_error);

  std::istringstream weight_only("weight\n");
  CHECK_THROWS_AS(parse_csv_dataset(weight_only, "data.csv"), parse_error);
}

TEST_CASE("attribution json carries scores and metadata") {
  attribution a;
  a.features = {"x", "y"};
  a.scores = {1.5, -0.5};
  a.method = "bshap";
  a.baseline_note = "zeros";
  const nlohmann::json doc = nlohmann::json::parse(attribution_to_json(a));
  CHECK(doc.at("scores").at("x").get<double>() == 1.5);
  CHECK(doc.at("scores").at("y").get<double>() == -0.5);
  CHECK(doc.at("metadata").at("method").get<std::string>() == "bshap");
  CHECK(doc.at("metadata").at("baseline").get<std::string>() == "zeros");
  CHECK(doc.at("metadata").at("sum").get<double>() == 1.0);
}

TEST_CASE("scenario text report marks passing and failing rows") {
  scenario_report report;
  report.name = "demo";
  report.pass = false;
  report.checks.push_back({"good.key", 1.0, 1.0, 1e-9, "pinned", 0.0, true});
  report.checks.push_back({"bad.key", 2.0, 1.0, 1e-9, "oracle", 1.0, false});
  const std::string text = scenario_report_to_text(report);
  CHECK(text.find("scenario demo: FAIL") != std::string::npos);
  CHECK(text.find("ok  ") != std::string::npos);
  CHECK(text.find("FAIL bad.key") != std::string::npos);
  CHECK(text.find("[pinned]") != std::string::npos);
}

TEST_CASE("cohort emit writes one file per method and format") {
  const temp_dir dir;
  const dataset data({"x", "y"}, {{0.0, 0.0}, {1.0, 2.0}, {2.0, 4.0}});
  const model_ptr f = parse_model_json(
      R"({"type": "expression", "source": "x + 2 * y"})");
  cohort_options options;
  options.methods = {{"bshap", 0.0}, {"ig", 0.0}};
  options.rows = {0, 1, 2};
  const cohort_report report = attribute_cohort(f, data, options);
  CHECK(report.features == std::vector<std::string>{"x", "y"});
  CHECK(report.errors.empty());

  const emitted_files files =
      emit_report(report, dir.path.string(), {"csv", "json", "svg"});
  CHECK(files.written.size() == 6);
  CHECK(files.warnings.empty());

  std::ifstream csv(dir.path / "bshap.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "method,explicand_row,feature,score");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 6);  // two features, three explicands

  std::ifstream json_in(dir.path / "ig.json");
  REQUIRE(json_in.good());
  nlohmann::json doc;
  json_in >> doc;
  CHECK(doc.at("method").get<std::string>() == "ig");
  CHECK(doc.at("explicand_rows").size() == 3);
  CHECK(doc.at("features").size() == 2);
  CHECK(doc.contains("summaries"));
  CHECK(doc.contains("scores"));

  std::ifstream svg_in(dir.path / "bshap.svg");
  REQUIRE(svg_in.good());
  std::stringstream svg;
  svg << svg_in.rdbuf();
  std::size_t boxes = 0;
  for (std::size_t at = svg.str().find("<rect"); at != std::string::npos;
       at = svg.str().find("<rect", at + 1))
    ++boxes;
  CHECK(boxes == 3);  // one background panel plus one box per feature
}

TEST_CASE("cohort emit with no methods warns and writes nothing") {
  const temp_dir dir;
  cohort_report report;
  report.features = {"x"};
  const emitted_files files = emit_report(report, dir.path.string(), {"csv"});
  CHECK(files.written.empty());
  CHECK(files.warnings.size() == 1);
}

TEST_CASE("five number summaries interpolate quartiles") {
  const five_number_summary s = summarize({4.0, 1.0, 3.0, 2.0});
  CHECK(s.min == 1.0);
  CHECK(s.q1 == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(s.median == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(s.q3 == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(s.max == 4.0);
  CHECK_THROWS_AS(summarize({std::nan("")}), argument_error);
}

TEST_CASE("cli attribute emits json scores") {
  const temp_dir dir;
  const std::string model = dir.file("cube.json",
      R"({"type": "expression", "source": "(x1 + x2) ^ 3",
          "features": ["x1", "x2"]})");
  const cli_run r = run({"attribute", "--model", model, "--method", "ig",
                         "--explicand", "5,1", "--baseline", "zeros",
                         "--steps", "300", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("scores").at("x1").get<double>() ==
        doctest::Approx(180.0).epsilon(1e-5));
  CHECK(doc.at("scores").at("x2").get<double>() ==
        doctest::Approx(36.0).epsilon(1e-4));
}

TEST_CASE("cli attribute text output names the method") {
  const temp_dir dir;
  const std::string model = dir.file("line.json",
      R"({"type": "linear", "coefficients": {"x": 2.0, "y": 1.0}})");
  const cli_run r = run({"attribute", "--model", model, "--method", "bshap",
                         "--explicand", "x=3,y=4", "--baseline", "zeros"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("bshap") != std::string::npos);
  CHECK(r.out.find("x") != std::string::npos);
}

TEST_CASE("cli scenario all passes against the golden file") {
  const cli_run r =
      run({"scenario", "all", "--golden", kGolden, "--format", "json"});
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.is_array());
  CHECK(doc.size() == 19);
  for (const auto& entry : doc) CHECK(entry.at("pass").get<bool>());
}

TEST_CASE("cli check runs a named instance") {
  const cli_run r = run({"check", "dummy", "--method", "bshap", "--instance",
                         "diabetes", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("pass").get<bool>());

  const cli_run failing = run({"check", "dummy", "--method", "ces_empirical",
                               "--instance", "table1", "--format", "json"});
  CHECK(failing.exit_code == 1);
}

TEST_CASE("cli cohort writes the requested files") {
  const temp_dir dir;
  const std::string model = dir.file("line.json",
      R"({"type": "linear", "coefficients": {"x": 2.0, "y": 1.0}})");
  const std::string csv = dir.file("data.csv", "x,y\n0,0\n1,2\n2,1\n3,3\n");
  const std::string out = (dir.path / "report").string();
  const cli_run r = run({"cohort", "--model", model, "--data", csv, "--out",
                         out, "--method", "bshap", "--count", "3",
                         "--format", "csv"});
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(fs::path(out) / "bshap.csv"));
}

TEST_CASE("cli usage errors exit with code two") {
  CHECK(run({}).exit_code == 2);
  CHECK(run({"attribute"}).exit_code == 2);
  CHECK(run({"attribute", "--model", "/nonexistent.json", "--method", "warp",
             "--explicand", "1"}).exit_code == 2);
  CHECK(run({"scenario", "no-such-scenario", "--golden", kGolden}).exit_code == 2);
}
