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

#pragma once

#include <cstdint>
#include <string_view>

namespace tiersim::units {

// Quantity parsers for config strings such as "256 GB", "80 GB/s", "10 us",
// "35.2 GFLOP/s". Decimal prefixes are powers of 1000 (GB = 1e9 bytes);
// binary prefixes (KiB, MiB, GiB, TiB) are powers of 1024. A bare number is
// taken in base units. All parsers throw ConfigError on malformed input.

double parse_bytes(std::string_view text);
std::uint64_t parse_byte_count(std::string_view text);  // rejects fractions
double parse_bandwidth(std::string_view text);          // bytes/second
double parse_duration(std::string_view text);           // seconds
double parse_flop_rate(std::string_view text);          // FLOP/second

}  // namespace tiersim::units
