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

#include <cmath>
#include <set>

#include "support.hpp"
#include "tiersim/errors.hpp"
#include "tiersim/workloads.hpp"

using namespace tiersim;
using namespace tiersim::workloads;
using test::small_system;

namespace {

const PolicyConfig kNone{PolicyKind::none, 8};
const PolicyConfig kSeq{PolicyKind::sequential, 8};
const PolicyConfig kStride{PolicyKind::stride, 8};

Trace one_page_read(std::uint64_t page_size) {
  Trace t;
  t.regions.push_back(Region{0, page_size, "p"});
  t.blocks.push_back(WorkBlock{0, {AccessRun{0, 0, page_size, AccessKind::read}}, 0});
  finalize(t);
  return t;
}

SimResult tiered_warm(const Trace& t, const SystemSpec& s, const PolicyConfig& p) {
  CacheState warm = warmup(t, s);
  return simulate(t, s, p, SimMode::tiered, &warm);
}

// Polynomial trace with footprint = ratio * fast capacity.
Trace poly(const SystemSpec& s, double ratio, std::uint32_t degree, Streams streams = Streams::one,
           std::uint32_t threads = 4) {
  auto elements = static_cast<std::uint64_t>(ratio * static_cast<double>(s.fast.capacity) / 8);
  return gen_polynomial({elements, degree, streams, threads, 16 * s.page_size});
}

std::uint64_t distinct_pages(const Trace& t, std::uint64_t page_size) {
  PageLayout layout(t.regions, page_size);
  std::vector<PageTouch> buf;
  std::set<PageId> pages;
  for (const auto& b : t.blocks)
    for (const auto& r : b.runs) {
      buf.clear();
      expand_run(r, layout, buf);
      for (const auto& pt : buf) pages.insert(pt.page);
    }
  return pages.size();
}

}  // namespace

TEST_CASE("page layout and run expansion") {
  PageLayout layout({Region{3, 5000, "a"}, Region{1, 4096, "b"}}, 4096);
  CHECK(layout.total_pages() == 3u);
  CHECK(layout.first_page(3) == 0u);
  CHECK(layout.first_page(1) == 2u);
  std::vector<PageTouch> out;
  expand_run(AccessRun{3, 4000, 200, AccessKind::write}, layout, out);
  REQUIRE(out.size() == 2u);
  CHECK(out[0] == PageTouch{0, 96, true, 3});
  CHECK(out[1] == PageTouch{1, 104, true, 3});
  out.clear();
  // Eight 16-byte segments 256 bytes apart share one page.
  expand_run(AccessRun{1, 0, 16, AccessKind::read, 8, 256}, layout, out);
  REQUIRE(out.size() == 1u);
  CHECK(out[0].bytes == 128u);
  CHECK(out[0].page == 2u);
}

TEST_CASE("one cold page costs latency plus both transfers") {
  SystemSpec s = default_system();
  Trace t = one_page_read(s.page_size);
  const double want = s.slow.access_latency + 4096 / s.slow.read_bandwidth + 4096 / s.fast.read_bandwidth;
  for (auto* sim : {&simulate, &simulate_reference}) {
    SimResult r = sim(t, s, kNone, SimMode::tiered, nullptr);
    CHECK(r.total_time == doctest::Approx(want).epsilon(1e-9));
    CHECK(r.demand_faults == 1u);
    CHECK(r.bytes_slow_read == 4096u);
    CHECK(r.bytes_fast_read == 4096u);
    CHECK(test::conservation_error(t, s, r, SimMode::tiered).empty());
  }
}

TEST_CASE("a dirty victim is written back alongside the fetch") {
  SystemSpec s = small_system(1);
  Trace t;
  t.regions.push_back(Region{0, 2 * 4096, "p"});
  t.blocks.push_back(WorkBlock{0, {AccessRun{0, 0, 4096, AccessKind::write}}, 0});
  t.blocks.push_back(WorkBlock{0, {AccessRun{0, 4096, 4096, AccessKind::read}}, 0});
  finalize(t);
  for (auto* sim : {&simulate, &simulate_reference}) {
    SimResult r = sim(t, s, kNone, SimMode::tiered, nullptr);
    CHECK(r.writebacks == 1u);
    CHECK(r.bytes_slow_write == 4096u);
    // Second miss: latency, then fetch and write-back sharing the slow tier.
    const double first = 10e-6 + 4096 / 10e9 + 4096 / 80e9;
    const double both = 4096 / (1.0 / (1 / 10e9 + 1 / 8e9));  // equal rates r: r/10 + r/8 = 1
    const double second = 10e-6 + both + 4096 / 80e9;
    // Block starts are rounded to the half nanosecond.
    CHECK(std::fabs(r.total_time - (first + second)) <= 1e-9);
  }
}

TEST_CASE("empty trace") {
  Trace t;
  finalize(t);
  SystemSpec s = small_system(16);
  for (auto mode : {SimMode::tiered, SimMode::single_tier}) {
    SimResult r = simulate(t, s, kSeq, mode);
    CHECK(r.total_time == 0.0);
    CHECK(r.demand_faults == 0u);
    CHECK(r.prefetch_issued == 0u);
    CHECK(r.bytes_fast_read + r.bytes_fast_write == 0u);
    CHECK(simulate_reference(t, s, kSeq, mode) == r);
  }
}

TEST_CASE("single-tier STREAM copy runs at the fast-tier bandwidth") {
  SystemSpec s = default_system();
  Trace t = gen_stream({StreamKernel::copy, 44ULL << 16, 44, 1 << 16});
  SimResult r = simulate(t, s, kNone, SimMode::single_tier);
  const double want = static_cast<double>(t.meta.total_bytes) / 80e9;
  CHECK(r.total_time == doctest::Approx(want).epsilon(0.01));
  CHECK(test::conservation_error(t, s, r, SimMode::single_tier).empty());
}

TEST_CASE("warm in-cache run matches the single-tier run") {
  SystemSpec s = small_system(1024);
  for (auto streams : {Streams::one, Streams::two}) {
    Trace t = poly(s, 0.5, 4, streams);
    SimResult tiered = tiered_warm(t, s, kSeq);
    SimResult base = simulate(t, s, kSeq, SimMode::single_tier);
    CHECK(tiered.demand_faults == 0u);
    CHECK(tiered.prefetch_issued == 0u);
    CHECK(tiered.total_time == doctest::Approx(base.total_time).epsilon(1e-12));
  }
}

TEST_CASE("warmup residency") {
  SystemSpec s = small_system(256);
  Trace fits = poly(s, 0.5, 0);
  CacheState a = warmup(fits, s);
  CHECK(a.size() == 128u);
  Trace twice = poly(s, 2.0, 0);
  CacheState b = warmup(twice, s);
  CHECK(b.size() == 256u);
  CHECK(b.full());
}

TEST_CASE("random trace at half the cache has no misses after warm-up") {
  SystemSpec s = small_system(512);
  Trace t = gen_random({256 * 4096, 3000, 4096, 1.0, 4, 5});
  SimResult r = tiered_warm(t, s, kStride);
  CHECK(r.demand_faults == 0u);
  CHECK(r.writebacks == 0u);
}

TEST_CASE("streaming twice the cache with readahead runs at the slow read bandwidth") {
  SystemSpec s = small_system(4096);
  Trace t = poly(s, 2.0, 0, Streams::one, 4);
  SimResult r = tiered_warm(t, s, kSeq);
  // Every page crosses the slow tier once before its touch completes.
  const double rate = static_cast<double>(t.meta.footprint_bytes) / r.total_time;
  CHECK(rate <= 10e9 * (1 + 1e-9));
  CHECK(rate >= 0.95 * 10e9);
}

TEST_CASE("readahead on one ascending stream faults once") {
  SystemSpec s = small_system(64);
  Trace t = gen_polynomial({512 * 512, 0, Streams::one, 1, 4096});
  const std::uint64_t pages = t.meta.footprint_bytes / 4096;
  for (auto p : {kSeq, kStride}) {
    SimResult r = simulate(t, s, p, SimMode::tiered);
    CHECK(r.demand_faults == 1u);
    CHECK(r.prefetch_useful == pages - 1);
  }
}

TEST_CASE("conservation and determinism over traces, policies, modes") {
  SystemSpec plain = small_system(64, 4096, 4);
  SystemSpec numa = plain;
  numa.numa = NumaSpec{};
  std::vector<Trace> traces{
      poly(plain, 1.5, 2, Streams::two),
      gen_stream({StreamKernel::triad, 20000, 3, 4096}),
      gen_gemm_tiled({64, 16, 8, 4}),
      gen_lu({96, LuVariant::naive, 0, 3}),
      gen_lu({96, LuVariant::tiled, 32, 3}),
      gen_fft3d({16, 4}),
      gen_random({300 * 4096, 2000, 4096, 0.5, 4, 3}),
  };
  for (const auto& t : traces) {
    for (const auto* s : {&plain, &numa}) {
      for (auto p : {kNone, kSeq, kStride}) {
        for (auto mode : {SimMode::tiered, SimMode::single_tier}) {
          SimResult a = simulate(t, *s, p, mode);
          CHECK_MESSAGE(test::conservation_error(t, *s, a, mode).empty(), t.meta.name);
          CHECK(simulate(t, *s, p, mode) == a);
          CHECK(a.total_time >= static_cast<double>(t.meta.total_flops) / s->peak_compute() * (1 - 1e-12));
          if (mode == SimMode::tiered) {
            const double cold = static_cast<double>(distinct_pages(t, 4096) * 4096) / s->slow.read_bandwidth;
            CHECK(a.total_time >= cold * (1 - 1e-9));
          }
          double fast = 0, slow = 0;
          for (const auto& b : a.bandwidth_samples) {
            fast += b.fast_bandwidth * b.width;
            slow += b.slow_bandwidth * b.width;
          }
          CHECK(fast == doctest::Approx(static_cast<double>(a.bytes_fast_read + a.bytes_fast_write)).epsilon(1e-6));
          CHECK(slow == doctest::Approx(static_cast<double>(a.bytes_slow_read + a.bytes_slow_write)).epsilon(1e-6));
        }
      }
    }
  }
}

TEST_CASE("single-tier results ignore the fast-tier capacity") {
  SystemSpec a = small_system(64);
  SystemSpec b = small_system(4096);
  b.slow.capacity = a.slow.capacity;
  Trace t = gen_stream({StreamKernel::add, 50000, 4, 8192});
  CHECK(simulate(t, a, kSeq, SimMode::single_tier) == simulate(t, b, kSeq, SimMode::single_tier));
}

TEST_CASE("streaming time grows with footprint") {
  SystemSpec s = small_system(512);
  for (std::uint32_t degree : {0u, 8u}) {
    double prev = 0;
    for (double ratio : {0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0, 3.0}) {
      Trace t = poly(s, ratio, degree);
      double time = tiered_warm(t, s, kSeq).total_time;
      CHECK(time >= prev);
      prev = time;
    }
  }
}

TEST_CASE("readahead never slows a streaming trace") {
  SystemSpec s = small_system(256);
  for (double ratio : {0.5, 1.0, 1.5, 3.0}) {
    for (std::uint32_t degree : {0u, 16u, 256u}) {
      for (auto streams : {Streams::one, Streams::two}) {
        Trace t = poly(s, ratio, degree, streams);
        double none = tiered_warm(t, s, kNone).total_time;
        CHECK(tiered_warm(t, s, kSeq).total_time <= none * (1 + 1e-6));
        CHECK(tiered_warm(t, s, kStride).total_time <= none * (1 + 1e-6));
      }
    }
  }
}

TEST_CASE("efficiency stays at or below one without NUMA") {
  SystemSpec s = small_system(256);
  for (double ratio : {0.5, 2.0}) {
    Trace t = poly(s, ratio, 4, Streams::two);
    double base = simulate(t, s, kSeq, SimMode::single_tier).total_time;
    CHECK(base / tiered_warm(t, s, kSeq).total_time <= 1 + 1e-9);
  }
}

TEST_CASE("local write placement beats the interleaved baseline on a write-heavy trace") {
  SystemSpec s = small_system(2048, 4096, 8);
  s.numa = NumaSpec{};
  Trace t = gen_stream({StreamKernel::copy, 64 * 1024, 8, 8192});
  double base = simulate(t, s, kNone, SimMode::single_tier).total_time;
  double local = tiered_warm(t, s, kNone).total_time;
  CHECK(local < base);
  s.numa->write_placement = WritePlacement::interleaved;
  CHECK(tiered_warm(t, s, kNone).total_time == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("fast path and reference agree on small traces") {
  SystemSpec s = small_system(32, 4096, 3);
  std::vector<Trace> traces{poly(s, 2.0, 1, Streams::two, 3), gen_random({100 * 4096, 400, 4096, 0.2, 3, 8}),
                            gen_lu({64, LuVariant::tiled, 16, 3})};
  for (const auto& t : traces) {
    for (auto p : {kNone, kSeq, kStride}) {
      SimResult a = simulate(t, s, p, SimMode::tiered);
      SimResult b = simulate_reference(t, s, p, SimMode::tiered);
      CHECK(a.total_time == doctest::Approx(b.total_time).epsilon(0.01));
      CHECK(a.demand_faults == b.demand_faults);
      CHECK(a.prefetch_issued == b.prefetch_issued);
      CHECK(a.prefetch_useful == b.prefetch_useful);
      CHECK(a.writebacks == b.writebacks);
      CHECK(a.bytes_slow_read == b.bytes_slow_read);
    }
  }
}

TEST_CASE("error paths") {
  SystemSpec s = small_system(16);
  Trace t = one_page_read(4096);
  SystemSpec tiny = s;
  tiny.slow.capacity = 2048;
  tiny.fast.capacity = 1024;
  CHECK_THROWS_AS(simulate(t, tiny, kNone, SimMode::tiered), ConfigError);
  Trace big;
  big.regions.push_back(Region{0, s.slow.capacity + 4096, "huge"});
  big.blocks.push_back(WorkBlock{0, {AccessRun{0, 0, 4096, AccessKind::read}}, 0});
  finalize(big);
  try {
    simulate(big, s, kNone, SimMode::tiered);
    FAIL("no error");
  } catch (const SimulationError& e) {
    CHECK(std::string(e.what()).find("slow tier capacity") != std::string::npos);
  }
  Trace bad = t;
  bad.blocks[0].runs[0].region = 9;
  CHECK_THROWS_AS(simulate(bad, s, kNone, SimMode::tiered), SimulationError);
  SystemSpec zero = s;
  zero.fast.read_bandwidth = 0;
  CHECK_THROWS_AS(simulate(t, zero, kNone, SimMode::single_tier), ConfigError);
}

TEST_CASE("reference refuses traces over its touch limit") {
  SystemSpec s = small_system(16);
  const std::uint64_t pages = kReferenceTouchLimit + 1;
  Trace t = gen_polynomial({pages * 512, 0, Streams::one, 1, 1 << 20});
  CHECK(count_page_touches(t, 4096) == pages);
  CHECK_THROWS_AS(simulate_reference(t, s, kNone, SimMode::single_tier), SimulationError);
  Trace ok = gen_polynomial({kReferenceTouchLimit * 512, 0, Streams::one, 1, 1 << 20});
  CHECK_NOTHROW(simulate_reference(ok, s, kNone, SimMode::single_tier));
}

TEST_CASE("mode names round-trip") {
  for (auto m : {SimMode::tiered, SimMode::single_tier}) CHECK(sim_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(sim_mode_from_string("hybrid"), ConfigError);
}
