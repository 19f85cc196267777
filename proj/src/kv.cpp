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

#include "deepris/kv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "deepris/error.hpp"

namespace deepris::kv {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* kind) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (!value.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || value.empty()) {
        throw ConfigError(key, std::string("expected ") + kind + ", got '" + value + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string_view rest = value;
    while (true) {
        const auto comma = rest.find(',');
        const auto piece = trim(rest.substr(0, comma));
        if (!piece.empty()) parts.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return parts;
}

}  // namespace

Entries parse(std::string_view text) {
    Entries out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

std::string format(const Entries& entries) {
    std::string s;
    for (const auto& [k, v] : entries) {
        s += k;
        s += '=';
        s += v;
        s += '\n';
    }
    return s;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    std::array<char, 512> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
    if (ec != std::errc()) throw NumericError("format_double: value does not fit");
    return std::string(buf.data(), ptr);
}

std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

std::string format_list(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

double to_double(const std::string& key, const std::string& value) {
    const double d = parse_number<double>(key, value, "a real number");
    if (!std::isfinite(d)) throw ConfigError(key, "value must be finite");
    return d;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
    // Accept integral reals such as 7e4 as well as plain integers.
    std::int64_t i = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), i);
    if (ec == std::errc() && ptr == value.data() + value.size() && !value.empty()) return i;
    const double d = to_double(key, value);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(key, "expected an integer, got '" + value + "'");
    return static_cast<std::int64_t>(d);
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
    std::uint64_t u = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), u);
    if (ec == std::errc() && ptr == value.data() + value.size() && !value.empty()) return u;
    const auto i = to_int(key, value);
    if (i < 0) throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
    return static_cast<std::uint64_t>(i);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& p : split_list(value)) out.push_back(to_double(key, p));
    return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& p : split_list(value)) {
        const auto i = to_int(key, p);
        if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
            throw ConfigError(key, "integer out of range: " + p);
        }
        out.push_back(static_cast<int>(i));
    }
    return out;
}

std::uint64_t digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace deepris::kv
