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

#include "tiersim/trace.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace tiersim {

std::uint32_t Trace::thread_count() const {
  std::set<ThreadId> ids;
  for (const auto& b : blocks) ids.insert(b.thread);
  return static_cast<std::uint32_t>(ids.size());
}

void finalize(Trace& trace) {
  auto& m = trace.meta;
  m.total_flops = 0;
  m.total_bytes = 0;
  m.footprint_bytes = 0;
  for (const auto& r : trace.regions) m.footprint_bytes += r.size;
  for (const auto& b : trace.blocks) {
    m.total_flops += b.flops;
    for (const auto& run : b.runs) m.total_bytes += run.bytes();
  }
  m.arithmetic_intensity =
      m.total_bytes == 0 ? 0.0 : static_cast<double>(m.total_flops) / static_cast<double>(m.total_bytes);
}

void validate(const Trace& trace) {
  std::unordered_map<RegionId, std::uint64_t> sizes;
  std::uint64_t footprint = 0;
  for (const auto& r : trace.regions) {
    if (r.size == 0) throw std::invalid_argument("region '" + r.label + "' has zero size");
    if (!sizes.emplace(r.id, r.size).second)
      throw std::invalid_argument("duplicate region id " + std::to_string(r.id));
    footprint += r.size;
  }
  std::uint64_t flops = 0;
  std::uint64_t bytes = 0;
  for (const auto& b : trace.blocks) {
    flops += b.flops;
    for (const auto& run : b.runs) {
      auto it = sizes.find(run.region);
      if (it == sizes.end())
        throw std::invalid_argument("run references unknown region " + std::to_string(run.region));
      if (run.length == 0) throw std::invalid_argument("run with zero length");
      if (run.count == 0) throw std::invalid_argument("run with zero count");
      if (run.count > 1 && run.stride < run.length)
        throw std::invalid_argument("strided run segments overlap");
      if (run.end() > it->second)
        throw std::invalid_argument("run extends past the end of region " + std::to_string(run.region));
      bytes += run.bytes();
    }
  }
  const auto& m = trace.meta;
  if (m.total_flops != flops || m.total_bytes != bytes || m.footprint_bytes != footprint)
    throw std::invalid_argument("trace meta totals disagree with trace content");
}

}  // namespace tiersim
