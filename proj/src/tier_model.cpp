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

#include "tiersim/tier_model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "tiersim/errors.hpp"

namespace tiersim {

const char* to_string(WritePlacement p) {
  return p == WritePlacement::local ? "local" : "interleaved";
}

WritePlacement write_placement_from_string(const std::string& s) {
  if (s == "local") return WritePlacement::local;
  if (s == "interleaved") return WritePlacement::interleaved;
  throw ConfigError("write_placement must be 'local' or 'interleaved', got '" + s + "'");
}

std::size_t SystemSpec::cache_pages() const {
  double usable = static_cast<double>(fast.capacity) * (1.0 - reserved_fraction);
  return static_cast<std::size_t>(std::floor(usable / static_cast<double>(page_size)));
}

SystemSpec default_system() {
  SystemSpec s;
  s.fast = TierSpec{"dram", 256'000'000'000ULL, 80e9, 80e9, 0.0};
  s.slow = TierSpec{"optane", 1'280'000'000'000ULL, 10e9, 8e9, 10e-6};
  s.page_size = 4096;
  s.threads = 44;
  s.cores = 44;
  s.per_core_compute = 35.2e9;
  return s;
}

namespace {

void validate_tier(const TierSpec& t, const std::string& which) {
  if (t.capacity == 0) throw ConfigError(which + ".capacity must be > 0");
  if (!(t.read_bandwidth > 0) || !std::isfinite(t.read_bandwidth))
    throw ConfigError(which + ".read_bandwidth must be > 0");
  if (!(t.write_bandwidth > 0) || !std::isfinite(t.write_bandwidth))
    throw ConfigError(which + ".write_bandwidth must be > 0");
  if (!(t.access_latency >= 0) || !std::isfinite(t.access_latency))
    throw ConfigError(which + ".access_latency must be >= 0");
}

}  // namespace

void validate(const SystemSpec& s, bool tiered) {
  validate_tier(s.fast, "fast");
  validate_tier(s.slow, "slow");
  if (s.page_size < 4096 || !std::has_single_bit(s.page_size))
    throw ConfigError("page_size must be a power of two >= 4096");
  if (s.threads < 1) throw ConfigError("threads must be >= 1");
  if (s.cores < 1) throw ConfigError("cores must be >= 1");
  if (!(s.per_core_compute > 0) || !std::isfinite(s.per_core_compute))
    throw ConfigError("per_core_compute must be > 0");
  if (!(s.reserved_fraction >= 0.0 && s.reserved_fraction < 1.0))
    throw ConfigError("reserved_fraction must be in [0, 1)");
  if (tiered) {
    if (s.fast.capacity >= s.slow.capacity)
      throw ConfigError("fast.capacity must be smaller than slow.capacity in tiered mode");
    if (s.cache_pages() == 0) throw ConfigError("fast tier holds no pages at this page_size");
  }
  if (s.numa) {
    if (s.numa->sockets != 2) throw ConfigError("numa.sockets must be 2");
    if (!(s.numa->cross_link_bandwidth > 0) || !std::isfinite(s.numa->cross_link_bandwidth))
      throw ConfigError("numa.cross_link_bandwidth must be > 0");
  }
}

CacheState::CacheState(std::size_t capacity_pages) : capacity_(capacity_pages) {
  if (capacity_pages == 0) throw std::invalid_argument("cache capacity must be at least one page");
  slots_.reserve(capacity_pages);
  index_.reserve(capacity_pages);
}

std::optional<EvictedPage> CacheState::admit(PageId page, bool dirty) {
  if (index_.contains(page)) throw std::logic_error("admit of a resident page");
  if (slots_.size() < capacity_) {
    index_.emplace(page, slots_.size());
    slots_.push_back(Slot{page, dirty, true});
    return std::nullopt;
  }
  for (;;) {
    Slot& s = slots_[hand_];
    if (s.referenced) {
      s.referenced = false;
      hand_ = (hand_ + 1) % capacity_;
      continue;
    }
    EvictedPage victim{s.page, s.dirty};
    index_.erase(s.page);
    s = Slot{page, dirty, true};
    index_.emplace(page, hand_);
    hand_ = (hand_ + 1) % capacity_;
    return victim;
  }
}

void CacheState::touch(PageId page, bool write) {
  auto it = index_.find(page);
  if (it == index_.end()) throw std::logic_error("touch of a non-resident page");
  Slot& s = slots_[it->second];
  s.referenced = true;
  s.dirty = s.dirty || write;
}

bool CacheState::is_dirty(PageId page) const {
  auto it = index_.find(page);
  return it != index_.end() && slots_[it->second].dirty;
}

bool CacheState::is_referenced(PageId page) const {
  auto it = index_.find(page);
  return it != index_.end() && slots_[it->second].referenced;
}

std::optional<std::size_t> CacheState::clock_hand() const {
  if (slots_.empty()) return std::nullopt;
  return hand_;
}

std::vector<PageId> CacheState::resident_pages() const {
  std::vector<PageId> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.page);
  return out;
}

}  // namespace tiersim
