/*
 * Copyright 2026 The mixrobust Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace mixrobust::csv {

// Minimal reader for the numeric, unquoted CSV files this project exchanges.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws IoError when absent.
  std::size_t column(std::string_view name) const;
};

std::vector<std::string> split_line(std::string_view line);

Table read(std::istream& in, std::string_view source_name = "<stream>");
Table read_file(const std::filesystem::path& path);

double to_double(std::string_view field, std::string_view context);
long long to_integer(std::string_view field, std::string_view context);
std::uint64_t to_uint64(std::string_view field, std::string_view context);

// Fixed-point formatting with the given number of decimals.
std::string fixed(double value, int decimals);
// Shortest round-trip representation.
std::string exact(double value);

}  // namespace mixrobust::csv
