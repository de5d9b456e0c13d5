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

// Dataset CSV: a header row of feature names followed by numeric rows. A
// leading "weight" column, when present, carries per-row weights.

#ifndef SHAPKIT_CSV_IO_HPP_
#define SHAPKIT_CSV_IO_HPP_

#include <iosfwd>
#include <string>

#include "shapkit/dataset.hpp"

namespace shapkit {

// Parse errors carry `origin` and a 1-based line number.
dataset parse_csv_dataset(std::istream& in, const std::string& origin);
dataset load_csv_dataset(const std::string& path);

// Writes the header (with a leading "weight" column iff the dataset is
// weighted) and one row per example. Round-trips through the parser.
void write_csv_dataset(const dataset& data, std::ostream& out);
void save_csv_dataset(const dataset& data, const std::string& path);

}  // namespace shapkit

#endif  // SHAPKIT_CSV_IO_HPP_
