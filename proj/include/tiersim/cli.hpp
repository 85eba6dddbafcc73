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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tiersim/analysis.hpp"
#include "tiersim/config.hpp"
#include "tiersim/engine.hpp"

namespace tiersim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBandFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr const char* kSweepSchema = "# tiersim-sweep-csv v1";
inline constexpr const char* kFeaturesSchema = "# tiersim-features-csv v1";
inline constexpr const char* kRunSchema = "# tiersim-run-csv v1";
inline constexpr const char* kSweepColumns =
    "workload,footprint_ratio,arithmetic_intensity,threads,policy,efficiency,base_time_s,tiered_time_s,"
    "demand_faults,prefetch_useful,error_code,base_bandwidth_gbs";
inline constexpr const char* kFeaturesColumns = "floor,knee_ai,threshold_ai";

struct Options {
  std::optional<std::string> out;
  unsigned jobs = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed;
};

// Shortest round-trip decimal form, '.' separator.
std::string format_number(double v);

void write_sweep_csv(std::ostream& out, const std::vector<EfficiencyPoint>& points);
void write_features_csv(std::ostream& out, const SweepFeatures& f);
void write_run_csv(std::ostream& out, const SimResult& r);
nlohmann::json summary_json(const Trace& trace, const SystemSpec& system, const RunConfig& cfg, const SimResult& r);

// Path of the features sidecar belonging to a sweep CSV
// ("dir/sweep.csv" -> "dir/sweep.features.csv").
std::string features_path(const std::string& sweep_csv);

// Each command reports errors on `err` and returns an exit code:
// 0 success, 1 band failure (report), 2 config error, 3 runtime error.
int cmd_run(const std::string& config_path, const Options& opt, std::ostream& log, std::ostream& err);
int cmd_sweep(const std::string& config_path, const Options& opt, std::ostream& log, std::ostream& err);
int cmd_report(const std::string& csv_path, const std::optional<std::string>& bands_path, std::ostream& out,
               std::ostream& err);

int main(int argc, char** argv);

}  // namespace tiersim::cli
