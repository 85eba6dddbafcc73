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
#include <map>
#include <string>
#include <vector>

namespace tiersim {

using RegionId = std::uint32_t;
using ThreadId = std::uint32_t;

enum class AccessKind : std::uint8_t { read, write };

struct Region {
  RegionId id = 0;
  std::uint64_t size = 0;
  std::string label;

  bool operator==(const Region&) const = default;
};

// A contiguous byte range of one region, optionally repeated `count` times
// at `stride` bytes apart (a strided run). count == 1 is a plain run; for
// count > 1 segments must not overlap (stride >= length).
struct AccessRun {
  RegionId region = 0;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  AccessKind kind = AccessKind::read;
  std::uint64_t count = 1;
  std::uint64_t stride = 0;

  std::uint64_t bytes() const { return length * count; }
  // One past the last byte touched.
  std::uint64_t end() const { return offset + (count - 1) * stride + length; }

  bool operator==(const AccessRun&) const = default;
};

// Unit of work for one thread: its runs execute in order while `flops` of
// computation overlap with them.
struct WorkBlock {
  ThreadId thread = 0;
  std::vector<AccessRun> runs;
  std::uint64_t flops = 0;

  bool operator==(const WorkBlock&) const = default;
};

struct TraceMeta {
  std::string name;
  std::map<std::string, std::string> parameters;
  std::uint64_t total_flops = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t footprint_bytes = 0;
  double arithmetic_intensity = 0.0;  // FLOP/byte

  bool operator==(const TraceMeta&) const = default;
};

struct Trace {
  std::vector<Region> regions;
  std::vector<WorkBlock> blocks;
  TraceMeta meta;

  // Number of distinct thread ids used by the blocks.
  std::uint32_t thread_count() const;

  bool operator==(const Trace&) const = default;
};

// Recomputes meta totals (flops, bytes, footprint, AI) from the content.
void finalize(Trace& trace);

// Checks region/run/meta invariants; throws std::invalid_argument.
void validate(const Trace& trace);

}  // namespace tiersim
