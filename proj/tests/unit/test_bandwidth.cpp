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


#include <doctest.h>

#include <random>

#include "tiersim/bandwidth.hpp"

using namespace tiersim;

namespace {

ShareEntity flow(std::uint64_t count, std::initializer_list<std::pair<Resource, double>> coef,
                 Priority prio = Priority::demand) {
  ShareEntity e;
  e.count = count;
  for (auto [r, c] : coef) e.coef[r] = c;
  e.priority = prio;
  return e;
}

// Max-min optimality check: every flow of a priority class has a resource
// that is saturated (counting higher classes) on which no flow of the same
// class gets a larger rate.
void check_bottlenecks(const std::vector<ShareEntity>& es) {
  ResourceVector load{};
  for (const auto& e : es)
    for (std::size_t r = 0; r < kNumResources; ++r) load[r] += e.count * e.coef[r] * e.rate;
  for (std::size_t r = 0; r < kNumResources; ++r) CHECK(load[r] <= 1.0 + 1e-9);
  for (const auto& e : es) {
    if (e.count == 0) continue;
    CHECK(e.rate > 0);
    bool has_bottleneck = false;
    for (std::size_t r = 0; r < kNumResources && !has_bottleneck; ++r) {
      if (e.coef[r] <= 0 || load[r] < 1.0 - 1e-7) continue;
      bool largest = true;
      for (const auto& f : es)
        if (f.count > 0 && f.priority == e.priority && f.coef[r] > 0 && f.rate > e.rate * (1 + 1e-7)) largest = false;
      has_bottleneck = largest;
    }
    CHECK(has_bottleneck);
  }
}

}  // namespace

TEST_CASE("equal flows split one resource") {
  std::vector<ShareEntity> es{flow(2, {{kFast0, 1 / 80e9}}), flow(2, {{kFast0, 1 / 80e9}})};
  max_min_share(es);
  CHECK(es[0].rate == doctest::Approx(20e9));
  CHECK(es[1].rate == doctest::Approx(20e9));
}

TEST_CASE("reads and writes share a tier through their coefficients") {
  // One reader at 10 GB/s and one writer at 8 GB/s: r/10 + r/8 = 1.
  std::vector<ShareEntity> es{flow(1, {{kSlow, 1 / 10e9}}), flow(1, {{kSlow, 1 / 8e9}})};
  max_min_share(es);
  const double r = 1.0 / (1 / 10e9 + 1 / 8e9);
  CHECK(es[0].rate == doctest::Approx(r));
  CHECK(es[1].rate == doctest::Approx(r));
}

TEST_CASE("prefetch only uses what demand leaves") {
  std::vector<ShareEntity> es{flow(1, {{kSlow, 1 / 10e9}, {kFast0, 1 / 80e9}}),
                              flow(3, {{kSlow, 1 / 10e9}}, Priority::prefetch)};
  max_min_share(es);
  CHECK(es[0].rate == doctest::Approx(10e9));
  CHECK(es[1].rate == doctest::Approx(0.0));
  es = {flow(1, {{kFast0, 1 / 80e9}}), flow(4, {{kSlow, 1 / 10e9}}, Priority::prefetch)};
  max_min_share(es);
  CHECK(es[0].rate == doctest::Approx(80e9));
  CHECK(es[1].rate == doctest::Approx(2.5e9));
}

TEST_CASE("a flow limited elsewhere frees capacity for the others") {
  std::vector<ShareEntity> es{flow(1, {{kFast0, 1 / 80e9}, {kLink01, 1 / 10e9}}), flow(1, {{kFast0, 1 / 80e9}})};
  max_min_share(es);
  CHECK(es[0].rate == doctest::Approx(10e9));
  CHECK(es[1].rate == doctest::Approx(70e9));
}

TEST_CASE("random instances satisfy the bottleneck conditions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> bw(1e9, 100e9);
  for (int round = 0; round < 500; ++round) {
    std::vector<ShareEntity> es;
    const int n = 1 + rng() % 8;
    for (int i = 0; i < n; ++i) {
      ShareEntity e;
      e.count = rng() % 4;
      e.priority = rng() % 3 == 0 ? Priority::prefetch : Priority::demand;
      const int used = 1 + rng() % 3;
      for (int u = 0; u < used; ++u) e.coef[rng() % kNumResources] = 1.0 / bw(rng);
      es.push_back(e);
    }
    // Prefetch flows are all-or-nothing when demand saturates their
    // resources; the check below skips starved ones.
    max_min_share(es);
    std::vector<ShareEntity> live;
    for (const auto& e : es)
      if (e.count > 0 && !(e.priority == Priority::prefetch && e.rate == 0)) live.push_back(e);
    check_bottlenecks(live);
    for (const auto& e : es)
      if (e.count > 0 && e.priority == Priority::prefetch && e.rate == 0) {
        // Starved only if one of its resources is full of demand traffic.
        bool blocked = false;
        for (std::size_t r = 0; r < kNumResources; ++r) {
          if (e.coef[r] <= 0) continue;
          double d = 0;
          for (const auto& f : es)
            if (f.priority == Priority::demand) d += f.count * f.coef[r] * f.rate;
          blocked = blocked || d >= 1.0 - 1e-7;
        }
        CHECK(blocked);
      }
  }
}

TEST_CASE("flow class coefficients") {
  SystemSpec s = default_system();
  FlowClasses plain(s, SimMode::tiered);
  CHECK(plain.coef(FlowClasses::kSlowRead)[kSlow] == 1 / 10e9);
  CHECK(plain.coef(FlowClasses::kSlowWrite)[kSlow] == 1 / 8e9);
  CHECK(plain.coef(FlowClasses::fast(0, false))[kFast0] == 1 / 80e9);
  CHECK(plain.coef(FlowClasses::fast(1, true))[kFast0] == 1 / 80e9);
  CHECK(plain.coef(FlowClasses::fast(1, true))[kFast1] == 0.0);

  s.numa = NumaSpec{};
  FlowClasses local(s, SimMode::tiered);
  FlowClasses base(s, SimMode::single_tier);
  const auto& w = local.coef(FlowClasses::fast(1, true));
  CHECK(w[kFast1] == doctest::Approx(1 / 40e9));
  CHECK(w[kFast0] == 0.0);
  CHECK(w[kLink10] == 0.0);
  const auto& wi = base.coef(FlowClasses::fast(1, true));
  CHECK(wi[kFast0] == doctest::Approx(0.5 / 40e9));
  CHECK(wi[kFast1] == doctest::Approx(0.5 / 40e9));
  CHECK(wi[kLink10] == doctest::Approx(0.5 / 10e9));
  // Reads stay interleaved under local write placement.
  CHECK(local.coef(FlowClasses::fast(0, false)) == base.coef(FlowClasses::fast(0, false)));
}

TEST_CASE("sample bins conserve bytes and coarsen past the bin limit") {
  SampleRecorder rec;
  rec.add(0, 3e-6, 1e9, 0);
  auto s = rec.samples();
  REQUIRE(s.size() == 3u);
  for (const auto& b : s) CHECK(b.fast_bandwidth == doctest::Approx(1e9));
  rec.add(0.5e-6, 2.0e-3, 2e9, 5e8);
  s = rec.samples();
  CHECK(s.size() <= SampleRecorder::kMaxBins);
  CHECK(s.front().width == doctest::Approx(2e-6));
  double fast = 0, slow = 0;
  for (const auto& b : s) {
    fast += b.fast_bandwidth * b.width;
    slow += b.slow_bandwidth * b.width;
  }
  CHECK(fast == doctest::Approx(3e-6 * 1e9 + (2.0e-3 - 0.5e-6) * 2e9));
  CHECK(slow == doctest::Approx((2.0e-3 - 0.5e-6) * 5e8));
}
