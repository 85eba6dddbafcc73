/*
 * Copyright 2026 The tiersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tiersim/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "tiersim/errors.hpp"

namespace tiersim::units {
namespace {

struct Suffix {
  std::string_view text;
  double scale;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits "12.5 GB/s" into (12.5, "GB/s").
std::pair<double, std::string_view> split_number(std::string_view text, std::string_view what) {
  auto s = trim(text);
  std::size_t i = 0;
  while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' ||
                          s[i] == 'e' || s[i] == 'E' || s[i] == '+' || s[i] == '-')) {
    // Stop at an 'e'/'E' that starts a unit rather than an exponent.
    if ((s[i] == 'e' || s[i] == 'E') &&
        (i + 1 >= s.size() || !(std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
                                s[i + 1] == '-' || s[i + 1] == '+'))) {
      break;
    }
    ++i;
  }
  double value = 0.0;
  auto num = s.substr(0, i);
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
  if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size() || !std::isfinite(value)) {
    throw ConfigError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return {value, trim(s.substr(i))};
}

template <std::size_t N>
double parse_with(std::string_view text, const std::array<Suffix, N>& table, std::string_view what) {
  auto [value, unit] = split_number(text, what);
  if (value < 0) throw ConfigError("negative " + std::string(what) + " '" + std::string(text) + "'");
  for (const auto& s : table) {
    if (unit == s.text) return value * s.scale;
  }
  throw ConfigError("unknown unit '" + std::string(unit) + "' in " + std::string(what) + " '" +
                    std::string(text) + "'");
}

constexpr double kKi = 1024.0;

constexpr std::array<Suffix, 11> kByteUnits{{
    {"", 1.0},
    {"B", 1.0},
    {"KB", 1e3},
    {"MB", 1e6},
    {"GB", 1e9},
    {"TB", 1e12},
    {"KiB", kKi},
    {"MiB", kKi * kKi},
    {"GiB", kKi * kKi * kKi},
    {"TiB", kKi * kKi * kKi * kKi},
    {"bytes", 1.0},
}};

constexpr std::array<Suffix, 10> kBandwidthUnits{{
    {"", 1.0},
    {"B/s", 1.0},
    {"KB/s", 1e3},
    {"MB/s", 1e6},
    {"GB/s", 1e9},
    {"TB/s", 1e12},
    {"KiB/s", kKi},
    {"MiB/s", kKi * kKi},
    {"GiB/s", kKi * kKi * kKi},
    {"TiB/s", kKi * kKi * kKi * kKi},
}};

constexpr std::array<Suffix, 6> kTimeUnits{{
    {"", 1.0},
    {"s", 1.0},
    {"ms", 1e-3},
    {"us", 1e-6},
    {"ns", 1e-9},
    {"ps", 1e-12},
}};

constexpr std::array<Suffix, 6> kFlopUnits{{
    {"", 1.0},
    {"FLOP/s", 1.0},
    {"MFLOP/s", 1e6},
    {"GFLOP/s", 1e9},
    {"TFLOP/s", 1e12},
    {"PFLOP/s", 1e15},
}};

}  // namespace

double parse_bytes(std::string_view text) { return parse_with(text, kByteUnits, "byte size"); }

std::uint64_t parse_byte_count(std::string_view text) {
  double v = parse_bytes(text);
  double r = std::round(v);
  if (std::fabs(v - r) > 1e-6 * std::max(1.0, v) || r > 1.8e19) {
    throw ConfigError("byte size '" + std::string(text) + "' is not a whole number of bytes");
  }
  return static_cast<std::uint64_t>(r);
}

double parse_bandwidth(std::string_view text) { return parse_with(text, kBandwidthUnits, "bandwidth"); }

double parse_duration(std::string_view text) { return parse_with(text, kTimeUnits, "duration"); }

double parse_flop_rate(std::string_view text) { return parse_with(text, kFlopUnits, "compute rate"); }

}  // namespace tiersim::units
