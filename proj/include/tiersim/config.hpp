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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tiersim/analysis.hpp"
#include "tiersim/engine.hpp"
#include "tiersim/prefetch.hpp"
#include "tiersim/tier_model.hpp"

namespace tiersim {

// Workload of a single run: either sized from `footprint_ratio` (relative
// to fast.capacity) or from absolute sizes (elements / n / footprint).
struct WorkloadConfig {
  Family family = Family::polynomial;
  std::optional<double> footprint_ratio;
  std::uint32_t threads = 0;  // 0 = system.threads

  std::uint64_t elements = 0;   // polynomial, stream
  std::uint64_t n = 0;          // gemm, lu_*, fft3d
  std::uint64_t footprint = 0;  // random, bytes
  std::uint64_t touches = 0;    // random; 0 = footprint / touch_bytes

  std::uint32_t degree = 0;
  std::uint64_t tile = 0;
  double ai = 0.0;
  workloads::Streams streams = workloads::Streams::one;
  workloads::StreamKernel kernel = workloads::StreamKernel::copy;
  std::uint32_t element_size = 8;
  std::uint64_t chunk = 0;  // 0 = 16 pages
  std::uint64_t touch_bytes = 4096;

  bool operator==(const WorkloadConfig&) const = default;
};

struct RunConfig {
  SystemSpec system = default_system();  // numa left empty; see `numa`
  NumaSpec numa_params;
  bool numa = false;
  WorkloadConfig workload;
  PolicyConfig policy{PolicyKind::sequential, 8};
  SimMode mode = SimMode::tiered;
  bool warmup = true;
  std::uint64_t seed = 1;
  std::string output = "out";
  std::string save_trace;  // empty = do not save

  SystemSpec effective_system() const;
  bool operator==(const RunConfig&) const = default;
};

struct SweepWorkload {
  FamilySpec spec;
  std::optional<std::vector<double>> ai_parameters;  // overrides grid.ai_parameters

  bool operator==(const SweepWorkload&) const = default;
};

struct SweepConfig {
  SystemSpec system = default_system();
  NumaSpec numa_params;
  bool numa = false;
  std::vector<SweepWorkload> workloads;
  SweepGrid grid;
  std::vector<PolicyConfig> policies{PolicyConfig{PolicyKind::sequential, 8}};
  std::uint64_t seed = 1;
  std::string output = "out";

  SystemSpec effective_system() const;
  bool operator==(const SweepConfig&) const = default;
};

// Parsers reject unknown keys and ill-typed values with a ConfigError that
// names the offending key path (e.g. "system.fast.capacity"), and validate
// the result before returning.
RunConfig parse_run_config(const nlohmann::json& j);
SweepConfig parse_sweep_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);

// Canonical JSON (base units as plain numbers) that parses back to an equal
// config.
nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const SweepConfig& c);
nlohmann::json to_json(const SystemSpec& s);

// Expected-value bands used by `report`.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Band&) const = default;
};

struct ReportBands {
  Band floor{0.115, 0.135};
  Band knee_ai{16.0, 32.0};
  Band threshold_ai{128.0, 256.0};
  std::map<std::string, Band> efficiency_at_max_ratio;  // by workload name

  bool operator==(const ReportBands&) const = default;
};

ReportBands parse_bands(const nlohmann::json& j);
ReportBands load_bands(const std::string& path);

// Builds the run's trace (threads and seed applied).
Trace build_trace(const RunConfig& c);

}  // namespace tiersim
