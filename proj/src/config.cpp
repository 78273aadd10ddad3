// Copyright 2026 The latentconcepts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "latentc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "latentc/errors.hpp"

namespace latentc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
         c == '-';
}

}  // namespace

std::filesystem::path ConfigFile::resolve(const std::string& value) const {
  std::filesystem::path p(value);
  if (p.is_absolute() || source.empty()) return p;
  return source.parent_path() / p;
}

std::string ConfigFile::where(const ConfigEntry& e) const {
  return (source.empty() ? std::string("config") : source.string()) + ":" + std::to_string(e.line);
}

void ConfigFile::fail(const ConfigEntry& e, const std::string& msg) const {
  throw usage_error(where(e) + ": " + e.key + ": " + msg);
}

ConfigFile parse_config(std::istream& in, std::filesystem::path source) {
  ConfigFile cfg;
  cfg.source = std::move(source);
  const std::string where = cfg.source.empty() ? std::string("config") : cfg.source.string();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw usage_error(where + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty() || !std::all_of(key.begin(), key.end(), key_char)) {
      throw usage_error(where + ":" + std::to_string(line_no) + ": bad key '" + std::string(key) + "'");
    }
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw usage_error(where + ":" + std::to_string(line_no) + ": unterminated quoted value");
      }
      value = value.substr(1, value.size() - 2);
    }
    cfg.entries.push_back({std::string(key), std::string(value), line_no});
  }
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file " + path.string());
  return parse_config(in, path);
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw usage_error(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0;
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
    throw usage_error(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw usage_error(std::string(what) + ": expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (item.empty()) throw usage_error("empty item in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::uint32_t> parse_layer_list(std::string_view text) {
  std::set<std::uint32_t> layers;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      layers.insert(static_cast<std::uint32_t>(parse_u64(item, "layers")));
      continue;
    }
    const auto lo = parse_u64(item.substr(0, dash), "layers");
    const auto hi = parse_u64(item.substr(dash + 1), "layers");
    if (hi < lo) throw usage_error("layers: empty range '" + item + "'");
    for (auto l = lo; l <= hi; ++l) layers.insert(static_cast<std::uint32_t>(l));
  }
  return {layers.begin(), layers.end()};
}

}  // namespace latentc
