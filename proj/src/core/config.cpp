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

#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "error.hpp"

namespace cotrain {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

class ValueParser {
 public:
  ValueParser(const ConfigDocument& doc, std::string_view text, int line)
      : doc_(doc), text_(text), line_(line) {}

  ConfigValue parse_all() {
    ConfigValue v = parse_value();
    skip_space();
    if (pos_ != text_.size()) {
      doc_.fail(line_, fmt::format("unexpected text after value: '{}'", text_.substr(pos_)));
    }
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  ConfigValue parse_value() {
    skip_space();
    if (pos_ >= text_.size()) doc_.fail(line_, "missing value");
    ConfigValue v;
    v.line = line_;
    const char c = text_[pos_];
    if (c == '"') {
      v.kind = ConfigValue::Kind::kString;
      ++pos_;
      while (true) {
        if (pos_ >= text_.size()) doc_.fail(line_, "unterminated string");
        const char ch = text_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= text_.size()) doc_.fail(line_, "unterminated escape");
          const char esc = text_[pos_++];
          switch (esc) {
            case '"': v.text += '"'; break;
            case '\\': v.text += '\\'; break;
            case 'n': v.text += '\n'; break;
            case 't': v.text += '\t'; break;
            default: doc_.fail(line_, fmt::format("unsupported escape '\\{}'", esc));
          }
          continue;
        }
        v.text += ch;
      }
      return v;
    }
    if (c == '[') {
      v.kind = ConfigValue::Kind::kArray;
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value());
        skip_space();
        if (pos_ >= text_.size()) doc_.fail(line_, "unterminated array");
        if (text_[pos_] == ',') {
          ++pos_;
          skip_space();
          if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return v;
          }
          continue;
        }
        if (text_[pos_] == ']') {
          ++pos_;
          return v;
        }
        doc_.fail(line_, "expected ',' or ']' in array");
      }
    }
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    const std::string_view token = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (token == "true" || token == "false") {
      v.kind = ConfigValue::Kind::kBool;
      v.boolean = token == "true";
      return v;
    }
    v.kind = ConfigValue::Kind::kNumber;
    v.text.assign(token);
    std::erase(v.text, '_');
    double probe = 0.0;
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), probe);
    if (v.text.empty() || ec != std::errc() || ptr != v.text.data() + v.text.size()) {
      doc_.fail(line_, fmt::format("'{}' is not a number, boolean, string or array", token));
    }
    return v;
  }

  const ConfigDocument& doc_;
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
  }
  return depth;
}

}  // namespace

void ConfigDocument::fail(int line, const std::string& message) const {
  throw Error(ErrorCode::kConfig, fmt::format("{}:{}: {}", source_, line, message));
}

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
  ConfigDocument doc;
  doc.source_ = std::move(source);
  doc.sections_[""];
  std::string section;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const int start_line = line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') doc.fail(line_no, "malformed section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) doc.fail(line_no, fmt::format("invalid section name '{}'", name));
      section.assign(name);
      if (doc.sections_.contains(section) && section != "") {
        doc.fail(line_no, fmt::format("duplicate section [{}]", section));
      }
      doc.sections_[section];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) doc.fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) doc.fail(line_no, fmt::format("invalid key '{}'", key));
    std::string value_text(trim(line.substr(eq + 1)));
    // Arrays may continue over several lines.
    while (bracket_balance(value_text) > 0) {
      if (!std::getline(in, raw)) doc.fail(start_line, "unterminated array");
      ++line_no;
      value_text += ' ';
      value_text += trim(strip_comment(raw));
    }
    auto& table = doc.sections_[section];
    if (table.contains(key)) {
      doc.fail(start_line, fmt::format("duplicate key '{}'", key));
    }
    table.emplace(key, ValueParser(doc, value_text, start_line).parse_all());
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot read config '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const ConfigValue* ConfigDocument::find(const std::string& section,
                                        const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

double ConfigDocument::as_real(const ConfigValue& v, std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kNumber) fail(v.line, fmt::format("{} must be a number", name));
  double out = 0.0;
  std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (!std::isfinite(out)) fail(v.line, fmt::format("{} must be finite", name));
  return out;
}

std::int64_t ConfigDocument::as_int(const ConfigValue& v, std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kNumber) {
    fail(v.line, fmt::format("{} must be an integer", name));
  }
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc() || ptr != v.text.data() + v.text.size()) {
    fail(v.line, fmt::format("{} = {} must be an integer", name, v.text));
  }
  return out;
}

std::uint64_t ConfigDocument::as_uint(const ConfigValue& v, std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kNumber) {
    fail(v.line, fmt::format("{} must be a non-negative integer", name));
  }
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc() || ptr != v.text.data() + v.text.size()) {
    fail(v.line, fmt::format("{} = {} must be a non-negative integer", name, v.text));
  }
  return out;
}

bool ConfigDocument::as_bool(const ConfigValue& v, std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kBool) fail(v.line, fmt::format("{} must be true or false", name));
  return v.boolean;
}

std::string ConfigDocument::as_string(const ConfigValue& v, std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kString) fail(v.line, fmt::format("{} must be a string", name));
  return v.text;
}

std::vector<double> ConfigDocument::as_real_list(const ConfigValue& v,
                                                 std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kArray) fail(v.line, fmt::format("{} must be an array", name));
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(as_real(item, name));
  return out;
}

std::vector<std::uint64_t> ConfigDocument::as_uint_list(const ConfigValue& v,
                                                        std::string_view name) const {
  if (v.kind != ConfigValue::Kind::kArray) fail(v.line, fmt::format("{} must be an array", name));
  std::vector<std::uint64_t> out;
  for (const auto& item : v.items) out.push_back(as_uint(item, name));
  return out;
}

}  // namespace cotrain
