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
#include <set>

#include "tiersim/errors.hpp"
#include "tiersim/prefetch.hpp"

using namespace tiersim;

namespace {

const std::map<RegionId, PageRange> kRegions{{0, {0, 1000}}, {1, {1000, 1100}}};

AccessEvent miss(PageId p, RegionId r = 0) {
  AccessEvent e;
  e.region = r;
  e.page = p;
  return e;
}

std::vector<PageId> pages(const std::vector<PrefetchRequest>& rs) {
  std::vector<PageId> out;
  for (const auto& r : rs) out.push_back(r.page);
  return out;
}

const ResidencyOracle kNothingResident = [](PageId) { return false; };

}  // namespace

TEST_CASE("none never requests") {
  NonePolicy p;
  CHECK(p.on_event(miss(10), kNothingResident).empty());
}

TEST_CASE("sequential(4) after a miss at page 10") {
  SequentialPolicy p(4, kRegions);
  auto r = p.on_event(miss(10), kNothingResident);
  CHECK(pages(r) == std::vector<PageId>{11, 12, 13, 14});
  for (std::uint32_t i = 0; i < r.size(); ++i) CHECK(r[i].priority == i);
}

TEST_CASE("sequential skips resident pages and stops at the region end") {
  SequentialPolicy p(4, kRegions);
  ResidencyOracle odd = [](PageId q) { return q % 2 == 1; };
  CHECK(pages(p.on_event(miss(10), odd)) == std::vector<PageId>{12, 14, 16, 18});
  CHECK(pages(p.on_event(miss(1097, 1), kNothingResident)) == std::vector<PageId>{1098, 1099});
  // Scan window is p+1 .. p+2k.
  ResidencyOracle dense = [](PageId q) { return q >= 11 && q <= 17; };
  CHECK(pages(p.on_event(miss(10), dense)) == std::vector<PageId>{18});
}

TEST_CASE("sequential fires on misses and first prefetched hits only") {
  SequentialPolicy p(2, kRegions);
  AccessEvent hit = miss(10);
  hit.hit = true;
  CHECK(p.on_event(hit, kNothingResident).empty());
  hit.prefetch_hit = true;
  CHECK(pages(p.on_event(hit, kNothingResident)) == std::vector<PageId>{11, 12});
}

TEST_CASE("stride(2) after misses at 0, 8, 16") {
  StridePolicy p(2, kRegions);
  p.on_event(miss(0), kNothingResident);
  p.on_event(miss(8), kNothingResident);
  CHECK(pages(p.on_event(miss(16), kNothingResident)) == std::vector<PageId>{24, 32});
}

TEST_CASE("stride history is per thread and region") {
  StridePolicy p(2, kRegions);
  AccessEvent e = miss(0);
  p.on_event(e, kNothingResident);
  e.thread = 1;
  e.page = 8;
  p.on_event(e, kNothingResident);
  e.thread = 0;
  e.page = 16;
  // Thread 0 has seen only 0 and 16: one delta, falls back to sequential.
  CHECK(pages(p.on_event(e, kNothingResident)) == std::vector<PageId>{17, 18});
}

TEST_CASE("negative strides are followed") {
  StridePolicy p(3, kRegions);
  for (PageId q : {900, 890, 880}) p.on_event(miss(q), kNothingResident);
  CHECK(pages(p.on_event(miss(870), kNothingResident)) == std::vector<PageId>{860, 850, 840});
}

TEST_CASE("policy names round-trip") {
  for (auto k : {PolicyKind::none, PolicyKind::sequential, PolicyKind::stride})
    CHECK(policy_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(policy_kind_from_string("markov"), ConfigError);
}

TEST_CASE("requests are bounded, non-resident, in-region and pure") {
  std::mt19937_64 rng(3);
  for (auto kind : {PolicyKind::sequential, PolicyKind::stride}) {
    for (int round = 0; round < 50; ++round) {
      const std::uint32_t k = 1 + rng() % 8;
      auto a = make_policy({kind, k}, kRegions);
      auto b = make_policy({kind, k}, kRegions);
      std::set<PageId> resident;
      ResidencyOracle oracle = [&](PageId q) { return resident.contains(q); };
      PageId cursor = rng() % 1000;
      for (int step = 0; step < 200; ++step) {
        AccessEvent e;
        e.thread = rng() % 3;
        e.region = rng() % 5 == 0 ? 1 : 0;
        const PageRange& range = kRegions.at(e.region);
        if (rng() % 2) cursor += rng() % 4;
        else cursor = rng() % 2000;
        e.page = range.first + cursor % (range.end - range.first);
        e.hit = resident.contains(e.page);
        e.prefetch_hit = e.hit && rng() % 2;
        auto ra = a->on_event(e, oracle);
        auto rb = b->on_event(e, oracle);
        CHECK(ra == rb);
        CHECK(ra.size() <= k);
        std::set<PageId> distinct;
        for (const auto& r : ra) {
          CHECK_FALSE(resident.contains(r.page));
          CHECK(range.contains(r.page));
          distinct.insert(r.page);
        }
        CHECK(distinct.size() == ra.size());
        resident.insert(e.page);
        for (const auto& r : ra) resident.insert(r.page);
        if (resident.size() > 300) resident.clear();
      }
    }
  }
}
