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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tiersim {

using PageId = std::uint64_t;

// One memory tier. Bandwidths are bytes/second, latency is seconds charged
// once per demand fault serviced by this tier.
struct TierSpec {
  std::string name;
  std::uint64_t capacity = 0;
  double read_bandwidth = 0.0;
  double write_bandwidth = 0.0;
  double access_latency = 0.0;

  bool operator==(const TierSpec&) const = default;
};

enum class WritePlacement { interleaved, local };

const char* to_string(WritePlacement p);
WritePlacement write_placement_from_string(const std::string& s);

// Two-socket layout. `write_placement` applies to the tiered run; the
// single-tier baseline always interleaves pages across sockets.
struct NumaSpec {
  std::uint32_t sockets = 2;
  double cross_link_bandwidth = 10e9;
  WritePlacement write_placement = WritePlacement::local;

  bool operator==(const NumaSpec&) const = default;
};

struct SystemSpec {
  TierSpec fast;
  TierSpec slow;
  std::uint64_t page_size = 4096;
  std::uint32_t threads = 44;
  std::uint32_t cores = 44;
  double per_core_compute = 35.2e9;  // FLOP/s, double precision
  double reserved_fraction = 0.0;    // of fast capacity, unavailable to the cache
  std::optional<NumaSpec> numa;

  double peak_compute() const { return static_cast<double>(cores) * per_core_compute; }
  // floor(usable fast capacity / page size)
  std::size_t cache_pages() const;

  bool operator==(const SystemSpec&) const = default;
};

// 2 x 22-core Broadwell node: 256 GB DRAM at 80 GB/s in front of 1280 GB of
// Optane at 10 GB/s read. The 8 GB/s slow-tier write bandwidth and the 10 us
// fault latency are model defaults, not measured values.
SystemSpec default_system();

// Throws ConfigError naming the offending field. `tiered` additionally
// requires the fast tier to be smaller than the slow tier.
void validate(const SystemSpec& system, bool tiered = true);

struct EvictedPage {
  PageId page = 0;
  bool was_dirty = false;

  bool operator==(const EvictedPage&) const = default;
};

// Fast-tier page cache with CLOCK (second-chance) replacement.
//
// Slots form a ring; the hand only moves once the ring is full. A victim
// search clears the referenced bit of every referenced slot it passes and
// evicts the first unreferenced one, leaving the hand just past the newly
// admitted page.
class CacheState {
 public:
  explicit CacheState(std::size_t capacity_pages);

  bool is_resident(PageId page) const { return index_.contains(page); }

  // Precondition: page not resident (throws std::logic_error otherwise).
  std::optional<EvictedPage> admit(PageId page, bool dirty);

  // Precondition: page resident (throws std::logic_error otherwise).
  void touch(PageId page, bool write);

  bool is_dirty(PageId page) const;
  bool is_referenced(PageId page) const;

  std::size_t size() const { return slots_.size(); }
  std::size_t capacity_pages() const { return capacity_; }
  bool full() const { return slots_.size() == capacity_; }

  // Slot index the next victim search starts from; empty when no page is
  // resident.
  std::optional<std::size_t> clock_hand() const;

  // Resident pages in ring order starting at slot 0.
  std::vector<PageId> resident_pages() const;

 private:
  struct Slot {
    PageId page;
    bool dirty;
    bool referenced;
  };

  std::size_t capacity_;
  std::size_t hand_ = 0;
  std::vector<Slot> slots_;
  std::unordered_map<PageId, std::size_t> index_;
};

}  // namespace tiersim
