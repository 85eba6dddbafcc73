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

#include "tiersim/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tiersim {

void max_min_share(std::vector<ShareEntity>& entities) {
  ResourceVector cap;
  cap.fill(1.0);
  for (Priority prio : {Priority::demand, Priority::prefetch}) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < entities.size(); ++i) {
      if (entities[i].priority != prio) continue;
      entities[i].rate = 0.0;
      if (entities[i].count > 0) active.push_back(i);
    }
    double level = 0.0;
    while (!active.empty()) {
      ResourceVector load{};
      for (std::size_t i : active) {
        const auto& e = entities[i];
        for (std::size_t r = 0; r < kNumResources; ++r) load[r] += static_cast<double>(e.count) * e.coef[r];
      }
      ResourceVector headroom;
      double delta = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < kNumResources; ++r) {
        headroom[r] = load[r] > 0 ? std::max(cap[r], 0.0) / load[r] : std::numeric_limits<double>::infinity();
        delta = std::min(delta, headroom[r]);
      }
      if (!std::isfinite(delta)) throw std::logic_error("flow uses no resource");
      level += delta;
      std::array<bool, kNumResources> saturated{};
      for (std::size_t r = 0; r < kNumResources; ++r) {
        if (load[r] <= 0) continue;
        if (headroom[r] <= delta * (1.0 + 1e-9)) {
          saturated[r] = true;
          cap[r] = 0.0;
        } else {
          cap[r] -= delta * load[r];
        }
      }
      std::vector<std::size_t> still;
      for (std::size_t i : active) {
        bool frozen = false;
        for (std::size_t r = 0; r < kNumResources; ++r) frozen = frozen || (saturated[r] && entities[i].coef[r] > 0);
        if (frozen) {
          entities[i].rate = level;
        } else {
          still.push_back(i);
        }
      }
      active.swap(still);
    }
  }
}

FlowClasses::FlowClasses(const SystemSpec& s, SimMode mode) {
  coef_[kSlowRead][kSlow] = 1.0 / s.slow.read_bandwidth;
  coef_[kSlowWrite][kSlow] = 1.0 / s.slow.write_bandwidth;
  const double r = s.fast.read_bandwidth;
  const double w = s.fast.write_bandwidth;
  if (!s.numa) {
    coef_[fast(0, false)][kFast0] = 1.0 / r;
    coef_[fast(0, true)][kFast0] = 1.0 / w;
    coef_[fast(1, false)] = coef_[fast(0, false)];
    coef_[fast(1, true)] = coef_[fast(0, true)];
    return;
  }
  // Each socket holds half of the fast bandwidth. Interleaved traffic goes
  // half to each socket, the remote half also crossing the link.
  const double link = s.numa->cross_link_bandwidth;
  const bool local_writes = mode == SimMode::tiered && s.numa->write_placement == WritePlacement::local;
  for (std::uint32_t sock = 0; sock < 2; ++sock) {
    const Resource here = sock == 0 ? kFast0 : kFast1;
    const Resource there = sock == 0 ? kFast1 : kFast0;
    const Resource inbound = sock == 0 ? kLink10 : kLink01;
    const Resource outbound = sock == 0 ? kLink01 : kLink10;
    auto& rd = coef_[fast(sock, false)];
    rd[here] = 0.5 / (r / 2);
    rd[there] = 0.5 / (r / 2);
    rd[inbound] = 0.5 / link;
    auto& wr = coef_[fast(sock, true)];
    if (local_writes) {
      wr[here] = 1.0 / (w / 2);
    } else {
      wr[here] = 0.5 / (w / 2);
      wr[there] = 0.5 / (w / 2);
      wr[outbound] = 0.5 / link;
    }
  }
}

// Bins covering [0, t).
void SampleRecorder::ensure_covers(double t) {
  auto needed = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / width_)));
  while (needed > kMaxBins) {
    std::vector<std::array<double, 2>> merged((bins_.size() + 1) / 2, std::array<double, 2>{0.0, 0.0});
    for (std::size_t i = 0; i < bins_.size(); ++i) {
      merged[i / 2][0] += bins_[i][0];
      merged[i / 2][1] += bins_[i][1];
    }
    bins_.swap(merged);
    width_ *= 2;
    needed = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / width_)));
  }
  if (bins_.size() < needed) bins_.resize(needed, std::array<double, 2>{0.0, 0.0});
}

void SampleRecorder::add(double t0, double t1, double fast_rate, double slow_rate) {
  if (!(t1 > t0)) return;
  ensure_covers(t1);
  auto first = static_cast<std::size_t>(std::floor(t0 / width_));
  auto last = std::min(static_cast<std::size_t>(std::floor(t1 / width_)), bins_.size() - 1);
  for (std::size_t i = first; i <= last; ++i) {
    double lo = std::max(t0, static_cast<double>(i) * width_);
    double hi = std::min(t1, static_cast<double>(i + 1) * width_);
    if (hi <= lo) continue;
    bins_[i][0] += fast_rate * (hi - lo);
    bins_[i][1] += slow_rate * (hi - lo);
  }
}

std::vector<BandwidthSample> SampleRecorder::samples() const {
  std::vector<BandwidthSample> out;
  out.reserve(bins_.size());
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    out.push_back(BandwidthSample{static_cast<double>(i) * width_, width_, bins_[i][0] / width_, bins_[i][1] / width_});
  }
  return out;
}

}  // namespace tiersim
