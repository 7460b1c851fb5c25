/*
 * Copyright 2026 The softsensor Authors.
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

#ifndef SOFTSENSOR_CORE_CSV_HPP
#define SOFTSENSOR_CORE_CSV_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "core/systems.hpp"

namespace softsensor {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);

struct CsvPrefixes {
  std::string state = "x";
  std::string output = "y";
  std::string input = "u";
};

/// Writes `t,x1..xn,y1..ym,u1..up` (column stems taken from `prefixes`).
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const CsvPrefixes& prefixes = {});

/// Reads a file written by write_trajectory_csv with the same prefixes.
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const CsvPrefixes& prefixes = {});

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_CSV_HPP
