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

#include "shapkit/csv_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "shapkit/errors.hpp"

namespace shapkit {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, const std::string& origin,
                  std::size_t line_number, std::size_t column) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || cell.empty()) {
    throw parse_error(origin + ":" + std::to_string(line_number) +
                      ": non-numeric cell '" + cell + "' in column " +
                      std::to_string(column + 1));
  }
  return value;
}

}  // namespace

dataset parse_csv_dataset(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_number = 0;

  // Header row; skip leading blank lines.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_cells(line);
    break;
  }
  if (header.empty()) {
    throw parse_error(origin + ": empty file, expected a CSV header row");
  }
  const bool weighted = header.front() == "weight";
  std::vector<std::string> names(header.begin() + (weighted ? 1 : 0), header.end());
  if (names.empty()) {
    throw parse_error(origin + ":" + std::to_string(line_number) +
                      ": header declares no feature columns");
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_cells(line);
    if (cells.size() != header.size()) {
      throw parse_error(origin + ":" + std::to_string(line_number) + ": expected " +
                        std::to_string(header.size()) + " cells, found " +
                        std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_cell(cells[c], origin, line_number, c);
      if (weighted && c == 0) {
        weights.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }

  if (weighted) return dataset(std::move(names), std::move(rows), std::move(weights));
  return dataset(std::move(names), std::move(rows));
}

dataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  return parse_csv_dataset(in, path);
}

void write_csv_dataset(const dataset& data, std::ostream& out) {
  const auto& names = data.feature_names();
  if (data.has_weights()) out << "weight,";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << (i + 1 < names.size() ? "," : "");
  }
  out << "\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    if (data.has_weights()) out << data.weight(r) << ",";
    const auto& row = data.raw_rows()[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c] << (c + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

void save_csv_dataset(const dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  write_csv_dataset(data, out);
  if (!out) throw io_error("failed writing '" + path + "'");
}

}  // namespace shapkit
