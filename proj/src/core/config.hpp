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

// Reader for the TOML subset used by experiment configs: [section] headers,
// `key = value` pairs, # comments, and values that are numbers, booleans,
// basic strings, or (possibly multi-line) arrays of those.
#ifndef COTRAIN_CORE_CONFIG_HPP_
#define COTRAIN_CORE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cotrain {

struct ConfigValue {
  enum class Kind { kNumber, kBool, kString, kArray };

  Kind kind = Kind::kNumber;
  std::string text;  // raw token for numbers, contents for strings
  bool boolean = false;
  std::vector<ConfigValue> items;
  int line = 0;
};

class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, std::string source);
  static ConfigDocument load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }

  // Section "" holds keys that appear before the first header.
  const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const {
    return sections_;
  }
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  // Typed accessors; errors carry "source:line".
  double as_real(const ConfigValue& v, std::string_view name) const;
  std::uint64_t as_uint(const ConfigValue& v, std::string_view name) const;
  std::int64_t as_int(const ConfigValue& v, std::string_view name) const;
  bool as_bool(const ConfigValue& v, std::string_view name) const;
  std::string as_string(const ConfigValue& v, std::string_view name) const;
  std::vector<double> as_real_list(const ConfigValue& v, std::string_view name) const;
  std::vector<std::uint64_t> as_uint_list(const ConfigValue& v, std::string_view name) const;

  [[noreturn]] void fail(int line, const std::string& message) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

}  // namespace cotrain

#endif  // COTRAIN_CORE_CONFIG_HPP_
