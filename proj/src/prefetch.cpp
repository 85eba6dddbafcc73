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

#include "tiersim/prefetch.hpp"

#include <utility>

#include "tiersim/errors.hpp"

namespace tiersim {

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::none: return "none";
    case PolicyKind::sequential: return "sequential";
    case PolicyKind::stride: return "stride";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "none") return PolicyKind::none;
  if (s == "sequential") return PolicyKind::sequential;
  if (s == "stride") return PolicyKind::stride;
  throw ConfigError("policy.name must be one of none/sequential/stride, got '" + s + "'");
}

namespace {

// Walks p + step*j for j = 1 .. 2k and keeps the first k candidates that are
// inside `range` and not resident.
std::vector<PrefetchRequest> scan(PageId p, std::int64_t step, std::uint32_t k, const PageRange& range,
                                  const ResidencyOracle& resident) {
  std::vector<PrefetchRequest> out;
  for (std::uint64_t j = 1; j <= 2ULL * k && out.size() < k; ++j) {
    auto candidate = static_cast<std::int64_t>(p) + step * static_cast<std::int64_t>(j);
    if (candidate < 0) break;
    auto q = static_cast<PageId>(candidate);
    if (!range.contains(q)) break;
    if (!resident(q)) out.push_back(PrefetchRequest{q, static_cast<std::uint32_t>(out.size())});
  }
  return out;
}

}  // namespace

SequentialPolicy::SequentialPolicy(std::uint32_t k, std::map<RegionId, PageRange> regions)
    : k_(k), regions_(std::move(regions)) {}

std::vector<PrefetchRequest> SequentialPolicy::on_event(const AccessEvent& ev, const ResidencyOracle& resident) {
  if ((ev.hit && !ev.prefetch_hit) || k_ == 0) return {};
  auto it = regions_.find(ev.region);
  if (it == regions_.end()) return {};
  return scan(ev.page, 1, k_, it->second, resident);
}

StridePolicy::StridePolicy(std::uint32_t k, std::map<RegionId, PageRange> regions)
    : k_(k), regions_(regions), fallback_(k, std::move(regions)) {}

std::vector<PrefetchRequest> StridePolicy::on_event(const AccessEvent& ev, const ResidencyOracle& resident) {
  auto key = (static_cast<std::uint64_t>(ev.thread) << 32) | ev.region;
  History& h = history_[key];
  if (h.seen > 0) {
    h.d2 = h.d1;
    h.d1 = static_cast<std::int64_t>(ev.page) - static_cast<std::int64_t>(h.last);
  }
  h.last = ev.page;
  if (h.seen < 3) ++h.seen;

  if (h.seen == 3 && h.d1 == h.d2 && h.d1 != 0 && k_ > 0) {
    auto it = regions_.find(ev.region);
    if (it == regions_.end()) return {};
    return scan(ev.page, h.d1, k_, it->second, resident);
  }
  return fallback_.on_event(ev, resident);
}

std::unique_ptr<PrefetchPolicy> make_policy(const PolicyConfig& cfg, const std::map<RegionId, PageRange>& regions) {
  switch (cfg.kind) {
    case PolicyKind::none: return std::make_unique<NonePolicy>();
    case PolicyKind::sequential: return std::make_unique<SequentialPolicy>(cfg.depth, regions);
    case PolicyKind::stride: return std::make_unique<StridePolicy>(cfg.depth, regions);
  }
  return std::make_unique<NonePolicy>();
}

}  // namespace tiersim
