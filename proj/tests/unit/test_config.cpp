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

#include "tiersim/config.hpp"
#include "tiersim/errors.hpp"

using namespace tiersim;
using nlohmann::json;

namespace {

std::string config_error(const json& j, bool sweep = false) {
  try {
    if (sweep) parse_sweep_config(j);
    else parse_run_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal run config takes defaults") {
  RunConfig c = parse_run_config(json::parse(R"({"workload": {"family": "polynomial", "footprint_ratio": 0.5}})"));
  CHECK(c.system == default_system());
  CHECK(c.policy == PolicyConfig{PolicyKind::sequential, 8});
  CHECK(c.mode == SimMode::tiered);
  CHECK(c.warmup);
  CHECK_FALSE(c.numa);
  CHECK(c.workload.footprint_ratio == 0.5);
}

TEST_CASE("unit strings are parsed to base units") {
  RunConfig c = parse_run_config(json::parse(R"({
    "system": {"fast": {"capacity": "1 GiB", "read_bandwidth": "40 GB/s"},
               "slow": {"access_latency": "20 us"}, "page_size": "2 MiB",
               "per_core_compute": "10 GFLOP/s"},
    "workload": {"family": "random", "footprint": "64 MiB", "ai": 2, "touch_bytes": "8 KiB"},
    "policy": {"name": "stride", "depth": 4}, "mode": "single_tier", "seed": 12})"));
  CHECK(c.system.fast.capacity == 1ULL << 30);
  CHECK(c.system.fast.read_bandwidth == 40e9);
  CHECK(c.system.slow.access_latency == doctest::Approx(20e-6));
  CHECK(c.system.page_size == 2u << 20);
  CHECK(c.system.per_core_compute == 10e9);
  CHECK(c.workload.footprint == 64u << 20);
  CHECK(c.workload.touch_bytes == 8192u);
  CHECK(c.policy == PolicyConfig{PolicyKind::stride, 4});
  CHECK(c.mode == SimMode::single_tier);
  CHECK(c.seed == 12u);
}

TEST_CASE("run config round-trips through JSON") {
  RunConfig c = parse_run_config(json::parse(R"({
    "system": {"fast": {"capacity": "8 GiB"}, "threads": 8, "cores": 8, "reserved_fraction": 0.25,
               "numa": {"cross_link_bandwidth": "20 GB/s", "write_placement": "interleaved"}},
    "numa": true,
    "workload": {"family": "stream", "elements": 100000, "kernel": "triad", "threads": 4, "chunk": "64 KiB"},
    "policy": {"name": "none"}, "warmup": false, "output": "somewhere", "save_trace": "t.trace"})"));
  CHECK(c.numa);
  CHECK(c.effective_system().numa.has_value());
  RunConfig back = parse_run_config(to_json(c));
  CHECK(back == c);
}

TEST_CASE("sweep config round-trips and accepts lists") {
  SweepConfig c = parse_sweep_config(json::parse(R"({
    "workloads": [{"family": "polynomial", "streams": "two"},
                  {"family": "lu_tiled", "ai_parameters": [64, 128]}],
    "grid": {"footprint_ratios": [0.5, 2], "ai_parameters": [0, 16], "threads": 8},
    "policies": [{"name": "none"}, {"name": "sequential", "depth": 16}], "seed": 3})"));
  REQUIRE(c.workloads.size() == 2u);
  CHECK(c.workloads[1].ai_parameters == std::vector<double>{64, 128});
  CHECK(c.policies.size() == 2u);
  CHECK(c.grid.threads == 8u);
  CHECK(parse_sweep_config(to_json(c)) == c);
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK(config_error(json::parse(R"({"workload": {"family": "polynomial", "footprint_ratio": 1}, "bogus": 1})"))
            .find("bogus") != std::string::npos);
  CHECK(config_error(json::parse(
                         R"({"system": {"fast": {"capacty": 1}}, "workload": {"family": "polynomial", "footprint_ratio": 1}})"))
            .find("system.fast.capacty") != std::string::npos);
  // Knobs belong to their family.
  CHECK(config_error(json::parse(R"({"workload": {"family": "fft3d", "footprint_ratio": 1, "degree": 4}})"))
            .find("workload.degree") != std::string::npos);
  CHECK(config_error(json::parse(R"({"workload": {"family": "polynomial"}, "grid": {"footprint_ratios": [1], "x": 2}})"),
                     true)
            .find("grid.x") != std::string::npos);
}

TEST_CASE("invalid values are config errors naming the key") {
  CHECK(config_error(json::parse(R"({"system": {"page_size": 1000}, "workload": {"family": "polynomial", "footprint_ratio": 1}})"))
            .find("page_size") != std::string::npos);
  CHECK(config_error(json::parse(R"({"workload": {"family": "warp", "footprint_ratio": 1}})")).find("warp") !=
        std::string::npos);
  CHECK_FALSE(config_error(json::parse(R"({"workload": {"family": "polynomial", "footprint_ratio": "lots"}})")).empty());
  CHECK_FALSE(config_error(json::parse(R"({"workload": {"family": "polynomial", "footprint_ratio": 1, "elements": 5}})"))
                  .empty());
  CHECK_FALSE(config_error(json::parse(R"({"workload": {"family": "polynomial"}, "grid": {"footprint_ratios": []}})"), true)
                  .empty());
  CHECK_FALSE(config_error(json::parse(R"({"system": {"fast": {"read_bandwidth": "80 GB"}}, "workload": {"family": "polynomial", "footprint_ratio": 1}})"))
                  .empty());
}

TEST_CASE("bands parse and default") {
  ReportBands d;
  CHECK(d.floor == Band{0.115, 0.135});
  CHECK(d.knee_ai == Band{16, 32});
  CHECK(d.threshold_ai == Band{128, 256});
  ReportBands b = parse_bands(json::parse(R"({"floor": [0.1, 0.2], "efficiency_at_max_ratio": {"lu_tiled": [0.8, 1.0]}})"));
  CHECK(b.floor == Band{0.1, 0.2});
  CHECK(b.knee_ai == d.knee_ai);
  CHECK(b.efficiency_at_max_ratio.at("lu_tiled") == Band{0.8, 1.0});
  CHECK_THROWS_AS(parse_bands(json::parse(R"({"floor": [0.3, 0.2]})")), ConfigError);
  CHECK_THROWS_AS(parse_bands(json::parse(R"({"flor": [0.1, 0.2]})")), ConfigError);
}

TEST_CASE("build_trace applies sizes and threads") {
  RunConfig c = parse_run_config(json::parse(
      R"({"system": {"fast": {"capacity": "64 MiB"}}, "workload": {"family": "polynomial", "footprint_ratio": 2, "degree": 8, "threads": 4}})"));
  Trace t = build_trace(c);
  CHECK(t.meta.footprint_bytes == 128u << 20);
  CHECK(t.thread_count() == 4u);
  CHECK(t.meta.arithmetic_intensity == 2.0);
  c = parse_run_config(json::parse(R"({"workload": {"family": "gemm", "n": 64, "tile": 16}})"));
  CHECK(build_trace(c).meta.total_flops == 2u * 64 * 64 * 64);
}
