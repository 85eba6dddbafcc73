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
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tiersim/tier_model.hpp"
#include "tiersim/trace.hpp"

namespace tiersim {

// One demand page touch as seen by a prefetch policy.
struct AccessEvent {
  ThreadId thread = 0;
  RegionId region = 0;
  PageId page = 0;
  bool write = false;
  bool hit = false;
  // First demand touch of a page that was brought in by prefetch.
  bool prefetch_hit = false;
  double time = 0.0;
};

struct PrefetchRequest {
  PageId page = 0;
  std::uint32_t priority = 0;  // 0 is most urgent

  bool operator==(const PrefetchRequest&) const = default;
};

// Half-open global page range [first, end) occupied by one region.
struct PageRange {
  PageId first = 0;
  PageId end = 0;

  bool contains(PageId p) const { return p >= first && p < end; }
};

// True if the page is resident or already being fetched.
using ResidencyOracle = std::function<bool(PageId)>;

enum class PolicyKind { none, sequential, stride };

const char* to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::none;
  std::uint32_t depth = 8;  // k

  std::string name() const { return to_string(kind); }
  bool operator==(const PolicyConfig&) const = default;
};

class PrefetchPolicy {
 public:
  virtual ~PrefetchPolicy() = default;
  virtual std::vector<PrefetchRequest> on_event(const AccessEvent& ev, const ResidencyOracle& resident) = 0;
};

// Returns nothing, ever.
class NonePolicy final : public PrefetchPolicy {
 public:
  std::vector<PrefetchRequest> on_event(const AccessEvent&, const ResidencyOracle&) override { return {}; }
};

// Readahead: on a miss, or on the first touch of a prefetched page, requests
// the first k non-resident pages of p+1 .. p+2k inside the region.
class SequentialPolicy final : public PrefetchPolicy {
 public:
  SequentialPolicy(std::uint32_t k, std::map<RegionId, PageRange> regions);
  std::vector<PrefetchRequest> on_event(const AccessEvent& ev, const ResidencyOracle& resident) override;

 private:
  std::uint32_t k_;
  std::map<RegionId, PageRange> regions_;
};

// Tracks the last two page deltas per (thread, region). With two equal
// non-zero deltas s it requests the first k non-resident pages of
// p+s, p+2s, .. p+2ks inside the region; otherwise it acts as SequentialPolicy.
class StridePolicy final : public PrefetchPolicy {
 public:
  StridePolicy(std::uint32_t k, std::map<RegionId, PageRange> regions);
  std::vector<PrefetchRequest> on_event(const AccessEvent& ev, const ResidencyOracle& resident) override;

 private:
  struct History {
    PageId last = 0;
    std::int64_t d1 = 0;  // most recent delta
    std::int64_t d2 = 0;
    std::uint32_t seen = 0;  // events observed, saturating at 3
  };

  std::uint32_t k_;
  std::map<RegionId, PageRange> regions_;
  std::unordered_map<std::uint64_t, History> history_;
  SequentialPolicy fallback_;
};

std::unique_ptr<PrefetchPolicy> make_policy(const PolicyConfig& cfg, const std::map<RegionId, PageRange>& regions);

}  // namespace tiersim
