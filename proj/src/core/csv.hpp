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

// Minimal CSV support for the numeric tables this project reads and writes.
// Fields never contain commas or quotes, so no quoting is implemented.
#ifndef COTRAIN_CORE_CSV_HPP_
#define COTRAIN_CORE_CSV_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace cotrain::csv {

// Shortest text that round-trips a double (17 significant digits).
std::string format_real(double value);

class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

  Writer& field(std::string_view text);
  Writer& field(double value);
  Writer& field(std::int64_t value);
  Writer& field(std::size_t value);
  Writer& field(const char* text) { return field(std::string_view(text)); }
  Writer& field(int value) { return field(static_cast<std::int64_t>(value)); }
  Writer& field(bool value) { return field(static_cast<std::int64_t>(value ? 1 : 0)); }
  void end_row();

  const std::filesystem::path& path() const { return path_; }

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  bool row_started_ = false;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column position for `name`; throws when absent.
  std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

double parse_real(std::string_view text, std::string_view context);
std::int64_t parse_int(std::string_view text, std::string_view context);

}  // namespace cotrain::csv

#endif  // COTRAIN_CORE_CSV_HPP_
