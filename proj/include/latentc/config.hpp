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

#pragma once

// Flat key/value config files.
//
//   # comment
//   key = value
//   annotation.POS = "data/pos.tsv"
//
// One entry per line. Keys are [A-Za-z0-9_.-]+; values run to end of line
// and may be wrapped in double quotes. A key may repeat only where the
// consumer allows it.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace latentc {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct ConfigFile {
  std::filesystem::path source;  // empty for in-memory text
  std::vector<ConfigEntry> entries;

  /// Path relative to the config file's directory unless absolute.
  std::filesystem::path resolve(const std::string& value) const;
  /// "path:line" for an entry.
  std::string where(const ConfigEntry& e) const;
  /// Usage error pointing at the entry's line.
  [[noreturn]] void fail(const ConfigEntry& e, const std::string& msg) const;
};

ConfigFile parse_config(std::istream& in, std::filesystem::path source = {});
ConfigFile load_config(const std::filesystem::path& path);

std::uint64_t parse_u64(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
/// Comma-separated list; surrounding spaces trimmed, empty items rejected.
std::vector<std::string> split_list(std::string_view text);
/// "0,2,5-7" style layer list.
std::vector<std::uint32_t> parse_layer_list(std::string_view text);

}  // namespace latentc
