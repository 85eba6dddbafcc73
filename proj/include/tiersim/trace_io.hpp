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

#include <iosfwd>
#include <string>

#include "tiersim/trace.hpp"

namespace tiersim {

// Line-oriented text container, version 1:
//
//   tiersim-trace 1
//   name <text>
//   param <key> <text>          (zero or more)
//   regions <count>
//   region <id> <size> <label>  (count lines)
//   blocks <count>
//   block <thread> <flops> <runs>
//   run <region> <offset> <length> <r|w> <count> <stride>
//   end
//
// Meta totals are not stored; they are recomputed on load. Keys must not
// contain whitespace and no field may contain a newline.
inline constexpr int kTraceFormatVersion = 1;

void write_trace(std::ostream& out, const Trace& trace);
// Throws ConfigError on malformed input or an unsupported version.
Trace read_trace(std::istream& in);

void save_trace(const std::string& path, const Trace& trace);
Trace load_trace(const std::string& path);

}  // namespace tiersim
