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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tiersim/engine.hpp"
#include "tiersim/tier_model.hpp"

namespace tiersim {

// Shared resources. Capacity of each is 1.0 (fraction of busy time); a flow
// moving at r bytes/s occupies coef[i] * r of resource i.
enum Resource : std::size_t { kFast0 = 0, kFast1, kSlow, kLink01, kLink10, kNumResources };
using ResourceVector = std::array<double, kNumResources>;

enum class Priority : std::uint8_t { demand = 0, prefetch = 1 };

// `count` identical flows sharing one coefficient vector.
struct ShareEntity {
  std::uint64_t count = 1;
  ResourceVector coef{};
  Priority priority = Priority::demand;
  double rate = 0.0;  // output, bytes/s per flow
};

// Max-min fair rates by progressive filling: demand entities first, then
// prefetch entities on the residual capacity. Every entity with count > 0
// must use at least one resource.
void max_min_share(std::vector<ShareEntity>& entities);

// Flow classes of one simulation. Ids: 0 slow read, 1 slow write,
// 2 + 2*socket + write for fast-tier transfers.
class FlowClasses {
 public:
  static constexpr std::size_t kSlowRead = 0;
  static constexpr std::size_t kSlowWrite = 1;
  static constexpr std::size_t kCount = 6;

  FlowClasses(const SystemSpec& system, SimMode mode);

  static std::size_t fast(std::uint32_t socket, bool write) { return 2 + 2 * socket + (write ? 1 : 0); }
  static bool is_fast(std::size_t cls) { return cls >= 2; }
  const ResourceVector& coef(std::size_t cls) const { return coef_[cls]; }

 private:
  std::array<ResourceVector, kCount> coef_{};
};

// Fixed-width time bins of transferred bytes. Bins start 1 us wide and are
// merged pairwise (width doubled) whenever more than kMaxBins are needed.
class SampleRecorder {
 public:
  static constexpr std::size_t kMaxBins = 1024;

  // Constant aggregate rates over [t0, t1).
  void add(double t0, double t1, double fast_rate, double slow_rate);
  std::vector<BandwidthSample> samples() const;

 private:
  void ensure_covers(double t);

  double width_ = 1e-6;
  std::vector<std::array<double, 2>> bins_;
};

}  // namespace tiersim
