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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tiersim/prefetch.hpp"
#include "tiersim/tier_model.hpp"
#include "tiersim/trace.hpp"

namespace tiersim {

enum class SimMode { tiered, single_tier };

const char* to_string(SimMode m);
SimMode sim_mode_from_string(const std::string& s);

// Average tier throughput over [time, time + width).
struct BandwidthSample {
  double time = 0.0;
  double width = 0.0;
  double fast_bandwidth = 0.0;  // bytes/s, reads + writes
  double slow_bandwidth = 0.0;

  bool operator==(const BandwidthSample&) const = default;
};

struct SimResult {
  double total_time = 0.0;
  std::vector<double> per_thread_time;  // indexed by rank of thread id
  std::uint64_t demand_faults = 0;
  std::uint64_t prefetch_issued = 0;
  std::uint64_t prefetch_useful = 0;
  std::uint64_t bytes_fast_read = 0;
  std::uint64_t bytes_fast_write = 0;
  std::uint64_t bytes_slow_read = 0;
  std::uint64_t bytes_slow_write = 0;
  std::uint64_t writebacks = 0;
  std::vector<BandwidthSample> bandwidth_samples;

  bool operator==(const SimResult&) const = default;
};

// Maps regions to consecutive page-aligned ranges of a global page space,
// in the order regions appear in the trace.
class PageLayout {
 public:
  PageLayout(const std::vector<Region>& regions, std::uint64_t page_size);

  std::uint64_t page_size() const { return page_size_; }
  PageId total_pages() const { return total_pages_; }
  const std::map<RegionId, PageRange>& ranges() const { return ranges_; }
  PageId first_page(RegionId r) const { return ranges_.at(r).first; }

 private:
  std::uint64_t page_size_;
  PageId total_pages_ = 0;
  std::map<RegionId, PageRange> ranges_;
};

struct PageTouch {
  PageId page = 0;
  std::uint64_t bytes = 0;
  bool write = false;
  RegionId region = 0;

  bool operator==(const PageTouch&) const = default;
};

// Splits a run into page touches in address order. Consecutive segments of
// the run that land in the same page are merged into one touch.
void expand_run(const AccessRun& run, const PageLayout& layout, std::vector<PageTouch>& out);

// Cache preloaded by replaying the trace's first-touch page order through
// CLOCK with clean admissions. If the footprint fits, every page is
// resident; otherwise the last capacity_pages first-touched pages are.
CacheState warmup(const Trace& trace, const SystemSpec& system);

// Event-driven simulation with grouped bandwidth accounting. `warm` seeds
// the fast-tier cache in tiered mode and is ignored in single-tier mode.
// Throws SimulationError on invalid traces or a footprint exceeding the
// slow tier; ConfigError on invalid systems.
SimResult simulate(const Trace& trace, const SystemSpec& system, const PolicyConfig& policy, SimMode mode,
                   const CacheState* warm = nullptr);

// Same contract as simulate(), but every page operation is its own flow and
// rates are recomputed per flow at every event. Throws SimulationError for
// traces with more than kReferenceTouchLimit page touches.
inline constexpr std::uint64_t kReferenceTouchLimit = 100'000;
SimResult simulate_reference(const Trace& trace, const SystemSpec& system, const PolicyConfig& policy,
                             SimMode mode, const CacheState* warm = nullptr);

// Number of page touches the trace expands to at this page size.
std::uint64_t count_page_touches(const Trace& trace, std::uint64_t page_size);

}  // namespace tiersim
