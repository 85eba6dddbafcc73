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

#include "tiersim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "tiersim/errors.hpp"

namespace tiersim {

double efficiency(const SimResult& base, const SimResult& tiered) {
  if (!(tiered.total_time > 0)) throw std::invalid_argument("efficiency undefined for zero tiered time");
  return base.total_time / tiered.total_time;
}

double theoretical_floor(const SystemSpec& s) { return s.slow.read_bandwidth / s.fast.read_bandwidth; }

double ai_threshold(const SystemSpec& s) { return s.peak_compute() / s.slow.read_bandwidth; }

double knee_ai(const SystemSpec& s) { return s.peak_compute() / s.fast.read_bandwidth; }

SweepFeatures compute_features(const SystemSpec& s) { return SweepFeatures{theoretical_floor(s), knee_ai(s), ai_threshold(s)}; }

const char* to_string(Family f) {
  switch (f) {
    case Family::polynomial: return "polynomial";
    case Family::stream: return "stream";
    case Family::gemm: return "gemm";
    case Family::lu_naive: return "lu_naive";
    case Family::lu_tiled: return "lu_tiled";
    case Family::fft3d: return "fft3d";
    case Family::random: return "random";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::polynomial, Family::stream, Family::gemm, Family::lu_naive, Family::lu_tiled, Family::fft3d,
                   Family::random}) {
    if (s == to_string(f)) return f;
  }
  throw ConfigError("unknown workload family '" + s + "'");
}

namespace {

std::uint64_t to_count(double v, const char* what) {
  if (!(v >= 0) || !std::isfinite(v) || v > 1.8e19) throw ConfigError(std::string(what) + " out of range");
  return static_cast<std::uint64_t>(std::llround(v));
}

// Block size for the streaming generators: the configured chunk, or 16 pages,
// capped at the smallest per-thread share.
std::uint64_t stream_chunk(std::uint64_t configured, std::uint64_t elements, std::uint32_t threads,
                           const SystemSpec& s) {
  std::uint64_t chunk = configured ? configured : 16 * s.page_size;
  std::uint64_t share = 8 * (elements / std::max<std::uint32_t>(threads, 1));
  if (configured == 0) chunk = std::max<std::uint64_t>(8, std::min(chunk, share));
  return chunk;
}

}  // namespace

Trace make_family_trace(const FamilySpec& spec, double ratio, double ai_parameter, std::uint32_t threads,
                        const SystemSpec& s) {
  if (!(ratio > 0) || !std::isfinite(ratio)) throw ConfigError("footprint_ratio must be > 0");
  const double target = ratio * static_cast<double>(s.fast.capacity);
  switch (spec.family) {
    case Family::polynomial: {
      workloads::PolynomialParams p;
      p.elements = to_count(target / 8, "polynomial elements");
      p.degree = static_cast<std::uint32_t>(to_count(ai_parameter, "polynomial degree"));
      p.streams = spec.streams;
      p.threads = threads;
      p.chunk = stream_chunk(spec.chunk, p.elements, threads, s);
      return workloads::gen_polynomial(p);
    }
    case Family::stream: {
      const bool three = spec.kernel == workloads::StreamKernel::add || spec.kernel == workloads::StreamKernel::triad;
      workloads::StreamParams p;
      p.kernel = spec.kernel;
      p.elements = to_count(target / (8.0 * (three ? 3 : 2)), "stream elements");
      p.threads = threads;
      p.chunk = stream_chunk(spec.chunk, p.elements, threads, s);
      return workloads::gen_stream(p);
    }
    case Family::gemm: {
      workloads::GemmParams p;
      p.tile = to_count(ai_parameter, "gemm tile");
      if (p.tile == 0) throw ConfigError("gemm tile must be > 0");
      p.element_size = spec.element_size;
      double n = std::sqrt(target / (3.0 * spec.element_size));
      p.n = p.tile * std::max<std::uint64_t>(1, to_count(n / static_cast<double>(p.tile), "gemm n"));
      p.threads = threads;
      return workloads::gen_gemm_tiled(p);
    }
    case Family::lu_naive:
    case Family::lu_tiled: {
      workloads::LuParams p;
      p.threads = threads;
      double n = std::sqrt(target / 8.0);
      if (spec.family == Family::lu_naive) {
        p.variant = workloads::LuVariant::naive;
        p.n = std::max<std::uint64_t>(1, to_count(n, "lu n"));
      } else {
        p.variant = workloads::LuVariant::tiled;
        p.tile = to_count(ai_parameter, "lu tile");
        if (p.tile == 0) throw ConfigError("lu tile must be > 0");
        p.n = p.tile * std::max<std::uint64_t>(1, to_count(n / static_cast<double>(p.tile), "lu n"));
      }
      return workloads::gen_lu(p);
    }
    case Family::fft3d: {
      workloads::Fft3dParams p;
      p.n = std::max<std::uint64_t>(2, to_count(std::cbrt(target / 16.0), "fft n"));
      p.threads = threads;
      return workloads::gen_fft3d(p);
    }
    case Family::random: {
      workloads::RandomParams p;
      p.touch_bytes = spec.touch_bytes;
      p.footprint = std::max(spec.touch_bytes, 4096 * to_count(std::floor(target / 4096), "random footprint"));
      p.touches = spec.touches ? spec.touches : p.footprint / std::max<std::uint64_t>(spec.touch_bytes, 1);
      p.ai = ai_parameter;
      p.threads = threads;
      p.seed = spec.seed;
      return workloads::gen_random(p);
    }
  }
  throw ConfigError("unknown workload family");
}

namespace {

EfficiencyPoint evaluate(const FamilySpec& family, double ratio, double ai_param, std::uint32_t threads,
                         bool warm_start, const SystemSpec& system, const PolicyConfig& policy) {
  EfficiencyPoint pt;
  pt.workload = to_string(family.family);
  pt.requested_ratio = ratio;
  pt.ai_parameter = ai_param;
  pt.footprint_ratio = ratio;
  pt.arithmetic_intensity = std::numeric_limits<double>::quiet_NaN();
  pt.threads = threads;
  pt.policy = policy.name();
  pt.efficiency = std::numeric_limits<double>::quiet_NaN();
  try {
    Trace trace = make_family_trace(family, ratio, ai_param, threads, system);
    pt.footprint_ratio = static_cast<double>(trace.meta.footprint_bytes) / static_cast<double>(system.fast.capacity);
    pt.arithmetic_intensity = trace.meta.arithmetic_intensity;
    pt.base = simulate(trace, system, policy, SimMode::single_tier);
    std::optional<CacheState> warm;
    if (warm_start) warm.emplace(warmup(trace, system));
    pt.tiered = simulate(trace, system, policy, SimMode::tiered, warm ? &*warm : nullptr);
    pt.base_time = pt.base.total_time;
    pt.tiered_time = pt.tiered.total_time;
    pt.efficiency = efficiency(pt.base, pt.tiered);
    pt.demand_faults = pt.tiered.demand_faults;
    pt.prefetch_useful = pt.tiered.prefetch_useful;
    if (pt.base_time > 0) {
      pt.base_bandwidth = static_cast<double>(pt.base.bytes_fast_read + pt.base.bytes_fast_write) / pt.base_time;
    }
  } catch (const ConfigError& e) {
    pt.error_code = "config_error";
    pt.error_message = e.what();
  } catch (const SimulationError& e) {
    pt.error_code = "simulation_error";
    pt.error_message = e.what();
  } catch (const std::exception& e) {
    pt.error_code = "internal_error";
    pt.error_message = e.what();
  }
  return pt;
}

}  // namespace

SweepTable run_sweep(const FamilySpec& family, const SweepGrid& grid, const SystemSpec& system,
                     const PolicyConfig& policy, unsigned jobs) {
  if (grid.footprint_ratios.empty() || grid.ai_parameters.empty()) throw ConfigError("sweep grid is empty");
  const std::uint32_t threads = grid.threads ? grid.threads : system.threads;
  struct Task {
    double ratio;
    double ai;
  };
  std::vector<Task> tasks;
  for (double ai : grid.ai_parameters)
    for (double r : grid.footprint_ratios) tasks.push_back(Task{r, ai});

  std::vector<EfficiencyPoint> points(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      points[i] = evaluate(family, tasks[i].ratio, tasks[i].ai, threads, grid.warmup, system, policy);
    }
  };
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, tasks.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    if (pa.ok() != pb.ok()) return pa.ok();
    if (!pa.ok()) return false;
    if (pa.arithmetic_intensity != pb.arithmetic_intensity) return pa.arithmetic_intensity < pb.arithmetic_intensity;
    return pa.footprint_ratio < pb.footprint_ratio;
  });
  SweepTable table;
  table.features = compute_features(system);
  table.points.reserve(points.size());
  for (std::size_t i : order) table.points.push_back(std::move(points[i]));
  return table;
}

}  // namespace tiersim
