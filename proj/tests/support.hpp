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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "tiersim/engine.hpp"
#include "tiersim/tier_model.hpp"
#include "tiersim/trace.hpp"

namespace tiersim::test {

// Default bandwidths and latency on a fast tier of `fast_pages` pages.
inline SystemSpec small_system(std::uint64_t fast_pages, std::uint64_t page_size = 4096,
                               std::uint32_t threads = 4) {
  SystemSpec s = default_system();
  s.page_size = page_size;
  s.fast.capacity = fast_pages * page_size;
  s.slow.capacity = 1024 * s.fast.capacity;
  s.threads = threads;
  return s;
}

// Slow-tier and fast-tier byte identities every tiered or single-tier
// result must satisfy. Returns an empty string when all hold.
inline std::string conservation_error(const Trace& trace, const SystemSpec& system, const SimResult& r,
                                      SimMode mode) {
  std::ostringstream e;
  const std::uint64_t p = system.page_size;
  double max_thread = 0.0;
  for (double t : r.per_thread_time) max_thread = std::max(max_thread, t);
  if (r.total_time != max_thread) e << "total_time != max(per_thread_time); ";
  if (r.bytes_slow_read != p * (r.demand_faults + r.prefetch_issued)) e << "slow read bytes; ";
  if (r.bytes_slow_write != p * r.writebacks) e << "slow write bytes; ";
  if (r.bytes_fast_read + r.bytes_fast_write != trace.meta.total_bytes) e << "fast bytes != trace bytes; ";
  if (r.prefetch_useful > r.prefetch_issued) e << "useful > issued; ";
  if (mode == SimMode::single_tier && (r.demand_faults != 0 || r.bytes_slow_read != 0 || r.bytes_slow_write != 0))
    e << "single-tier touched the slow tier; ";
  return e.str();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("tiersim_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace tiersim::test
