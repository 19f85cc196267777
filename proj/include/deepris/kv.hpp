/*
   Copyright 2026 The DeepRIS Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deepris::kv {

using Entries = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// whitespace around keys and values is trimmed. Throws ConfigError on a
/// line without '=' or an empty key.
Entries parse(std::string_view text);

/// Inverse of parse(): one `key=value` per line, in order.
std::string format(const Entries& entries);

/// Shortest decimal that round-trips, never in exponent notation.
std::string format_double(double v);

std::string format_list(const std::vector<double>& v);
std::string format_list(const std::vector<int>& v);

double to_double(const std::string& key, const std::string& value);
std::int64_t to_int(const std::string& key, const std::string& value);
std::uint64_t to_uint(const std::string& key, const std::string& value);
bool to_bool(const std::string& key, const std::string& value);
std::vector<double> to_double_list(const std::string& key, const std::string& value);
std::vector<int> to_int_list(const std::string& key, const std::string& value);

/// 64-bit FNV-1a.
std::uint64_t digest(std::string_view bytes);
std::string hex(std::uint64_t v);

}  // namespace deepris::kv
