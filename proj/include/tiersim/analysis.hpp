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
#include <string>
#include <vector>

#include "tiersim/engine.hpp"
#include "tiersim/prefetch.hpp"
#include "tiersim/tier_model.hpp"
#include "tiersim/trace.hpp"
#include "tiersim/workloads.hpp"

namespace tiersim {

// base.total_time / tiered.total_time. Throws std::invalid_argument when the
// tiered time is zero.
double efficiency(const SimResult& base, const SimResult& tiered);

// slow / fast read bandwidth: efficiency of a fully memory-bound workload.
double theoretical_floor(const SystemSpec& system);

// Peak compute over slow read bandwidth (FLOP/byte).
double ai_threshold(const SystemSpec& system);

// Peak compute over fast read bandwidth (FLOP/byte).
double knee_ai(const SystemSpec& system);

enum class Family { polynomial, stream, gemm, lu_naive, lu_tiled, fft3d, random };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

// A workload family plus the knobs a sweep holds fixed. The swept
// "AI parameter" is the polynomial degree, the GEMM/LU tile dimension or the
// random-access AI; stream, naive LU and FFT ignore it.
struct FamilySpec {
  Family family = Family::polynomial;
  workloads::Streams streams = workloads::Streams::one;
  workloads::StreamKernel kernel = workloads::StreamKernel::copy;
  std::uint32_t element_size = 8;  // gemm
  std::uint64_t chunk = 0;         // polynomial/stream block bytes; 0 = 16 pages
  std::uint64_t touches = 0;       // random; 0 = footprint / touch_bytes
  std::uint64_t touch_bytes = 4096;
  std::uint64_t seed = 1;

  bool operator==(const FamilySpec&) const = default;
};

// Builds the family's trace with footprint close to ratio * fast.capacity.
// Dimensions are rounded to what the generator accepts, so the realized
// ratio (trace footprint / fast.capacity) can differ slightly.
Trace make_family_trace(const FamilySpec& spec, double footprint_ratio, double ai_parameter, std::uint32_t threads,
                        const SystemSpec& system);

struct SweepGrid {
  std::vector<double> footprint_ratios;
  std::vector<double> ai_parameters{0.0};
  std::uint32_t threads = 0;  // 0 = system.threads
  bool warmup = true;

  bool operator==(const SweepGrid&) const = default;
};

struct EfficiencyPoint {
  std::string workload;
  double requested_ratio = 0.0;
  double ai_parameter = 0.0;
  double footprint_ratio = 0.0;
  double arithmetic_intensity = 0.0;
  std::uint32_t threads = 0;
  std::string policy;
  double efficiency = 0.0;
  double base_time = 0.0;
  double tiered_time = 0.0;
  std::uint64_t demand_faults = 0;
  std::uint64_t prefetch_useful = 0;
  std::string error_code;  // empty on success
  std::string error_message;
  double base_bandwidth = 0.0;  // fast-tier bytes / base_time
  SimResult base;
  SimResult tiered;

  bool ok() const { return error_code.empty(); }
};

struct SweepFeatures {
  double floor = 0.0;
  double knee_ai = 0.0;
  double threshold_ai = 0.0;

  bool operator==(const SweepFeatures&) const = default;
};

struct SweepTable {
  std::vector<EfficiencyPoint> points;
  SweepFeatures features;
};

SweepFeatures compute_features(const SystemSpec& system);

// Evaluates every (ratio, AI parameter) pair: single-tier baseline plus a
// tiered run (warm-started when grid.warmup). Failed points carry an error
// code. Points are sorted by (arithmetic_intensity, footprint_ratio), failed
// points last in grid order; `jobs` worker threads never change the result.
SweepTable run_sweep(const FamilySpec& family, const SweepGrid& grid, const SystemSpec& system,
                     const PolicyConfig& policy, unsigned jobs = 1);

}  // namespace tiersim
