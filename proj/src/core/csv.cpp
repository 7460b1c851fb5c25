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

#include "core/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/error.hpp"

namespace softsensor {

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    fail(ErrorCode::kConfig, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int count_columns(const std::vector<std::string>& header, const std::string& stem,
                  std::size_t start) {
  int count = 0;
  while (start + count < header.size() &&
         header[start + count] == stem + std::to_string(count + 1)) {
    ++count;
  }
  return count;
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const CsvPrefixes& prefixes) {
  traj.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  const auto n = traj.states[0].size();
  const auto m = traj.outputs[0].size();
  const auto p = traj.inputs[0].size();
  out << 't';
  for (Eigen::Index i = 0; i < n; ++i) out << ',' << prefixes.state << i + 1;
  for (Eigen::Index i = 0; i < m; ++i) out << ',' << prefixes.output << i + 1;
  for (Eigen::Index i = 0; i < p; ++i) out << ',' << prefixes.input << i + 1;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(traj.states[k][i]);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(traj.outputs[k][i]);
    for (Eigen::Index i = 0; i < p; ++i) out << ',' << format_double(traj.inputs[k][i]);
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const CsvPrefixes& prefixes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kIo, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.empty() || header[0] != "t") {
    fail(ErrorCode::kConfig, path.string() + ": first column must be 't'");
  }
  const int n = count_columns(header, prefixes.state, 1);
  const int m = count_columns(header, prefixes.output, 1 + n);
  const int p = count_columns(header, prefixes.input, 1 + n + m);
  if (n == 0 || static_cast<std::size_t>(1 + n + m + p) != header.size()) {
    fail(ErrorCode::kConfig, path.string() + ": unexpected header '" + line + "'");
  }
  Trajectory traj;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::kConfig,
           path.string() + ":" + std::to_string(line_number) + ": wrong field count");
    }
    std::size_t col = 0;
    traj.times.push_back(parse_double(fields[col++]));
    Vector x(n), y(m), u(p);
    for (int i = 0; i < n; ++i) x[i] = parse_double(fields[col++]);
    for (int i = 0; i < m; ++i) y[i] = parse_double(fields[col++]);
    for (int i = 0; i < p; ++i) u[i] = parse_double(fields[col++]);
    traj.states.push_back(std::move(x));
    traj.outputs.push_back(std::move(y));
    traj.inputs.push_back(std::move(u));
  }
  traj.validate();
  return traj;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace softsensor
