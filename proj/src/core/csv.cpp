/*
 * Copyright 2026 The cotrainlab Authors.
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

#include "csv.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "error.hpp"

namespace cotrain::csv {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", value);
}

Writer::Writer(const std::filesystem::path& path,
               const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}' for writing", path.string()));
  }
  for (const auto& name : header) field(name);
  end_row();
}

void Writer::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

Writer& Writer::field(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

Writer& Writer::field(double value) { return field(std::string_view(format_real(value))); }

Writer& Writer::field(std::int64_t value) {
  separator();
  out_ << value;
  return *this;
}

Writer& Writer::field(std::size_t value) {
  separator();
  out_ << value;
  return *this;
}

void Writer::end_row() {
  out_ << '\n';
  row_started_ = false;
  if (!out_) {
    throw Error(ErrorCode::kIo, fmt::format("write to '{}' failed", path_.string()));
  }
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kIo, fmt::format("missing column '{}'", name));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  }
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                              line_no, table.header.size(), fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) {
    throw Error(ErrorCode::kIo, fmt::format("'{}' has no header row", path.string()));
  }
  return table;
}

double parse_real(std::string_view text, std::string_view context) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kIo, fmt::format("{}: '{}' is not a real number", context, text));
  }
  return value;
}

std::int64_t parse_int(std::string_view text, std::string_view context) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kIo, fmt::format("{}: '{}' is not an integer", context, text));
  }
  return value;
}

}  // namespace cotrain::csv
