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

#include "tiersim/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tiersim/errors.hpp"

namespace tiersim::workloads {
namespace {

constexpr std::uint64_t kDouble = 8;
constexpr std::uint64_t kComplex = 16;
constexpr std::uint64_t kRandomAlign = 4096;

// Per-thread block lists merged round-robin into one list.
class BlockSink {
 public:
  explicit BlockSink(std::uint32_t threads) : per_thread_(threads) {}

  void add(ThreadId t, std::vector<AccessRun> runs, std::uint64_t flops) {
    per_thread_[t].push_back(WorkBlock{t, std::move(runs), flops});
  }

  // Appends the pending blocks to `out` interleaved by thread and clears them.
  void flush_into(std::vector<WorkBlock>& out) {
    std::size_t longest = 0;
    for (const auto& v : per_thread_) longest = std::max(longest, v.size());
    for (std::size_t i = 0; i < longest; ++i) {
      for (auto& v : per_thread_) {
        if (i < v.size()) out.push_back(std::move(v[i]));
      }
    }
    for (auto& v : per_thread_) v.clear();
  }

 private:
  std::vector<std::vector<WorkBlock>> per_thread_;
};

// [begin, end) of part `i` when `total` items are split into `parts`.
std::pair<std::uint64_t, std::uint64_t> partition(std::uint64_t total, std::uint32_t parts, std::uint32_t i) {
  auto at = [&](std::uint64_t k) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(total) * k / parts);
  };
  return {at(i), at(i + 1)};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

AccessRun run(RegionId region, std::uint64_t offset, std::uint64_t length, AccessKind kind) {
  return AccessRun{region, offset, length, kind, 1, length};
}

AccessRun strided(RegionId region, std::uint64_t offset, std::uint64_t length, AccessKind kind,
                  std::uint64_t count, std::uint64_t stride) {
  return AccessRun{region, offset, length, kind, count, count == 1 ? length : stride};
}

template <typename T>
std::string str(T v) {
  return fmt::format("{}", v);
}

}  // namespace

const char* to_string(Streams s) { return s == Streams::one ? "one" : "two"; }

const char* to_string(StreamKernel k) {
  switch (k) {
    case StreamKernel::copy: return "copy";
    case StreamKernel::scale: return "scale";
    case StreamKernel::add: return "add";
    case StreamKernel::triad: return "triad";
  }
  return "?";
}

const char* to_string(LuVariant v) { return v == LuVariant::naive ? "naive" : "tiled"; }

Streams streams_from_string(const std::string& s) {
  if (s == "one") return Streams::one;
  if (s == "two") return Streams::two;
  throw ConfigError("streams must be 'one' or 'two', got '" + s + "'");
}

StreamKernel stream_kernel_from_string(const std::string& s) {
  if (s == "copy") return StreamKernel::copy;
  if (s == "scale") return StreamKernel::scale;
  if (s == "add") return StreamKernel::add;
  if (s == "triad") return StreamKernel::triad;
  throw ConfigError("kernel must be one of copy/scale/add/triad, got '" + s + "'");
}

LuVariant lu_variant_from_string(const std::string& s) {
  if (s == "naive") return LuVariant::naive;
  if (s == "tiled") return LuVariant::tiled;
  throw ConfigError("variant must be 'naive' or 'tiled', got '" + s + "'");
}

Trace gen_polynomial(const PolynomialParams& p) {
  require(p.elements > 0, "polynomial: elements must be > 0");
  require(p.threads >= 1, "polynomial: threads must be >= 1");
  require(p.chunk > 0 && p.chunk % kDouble == 0, "polynomial: chunk must be a positive multiple of 8 bytes");
  require(p.elements >= p.threads, "polynomial: fewer elements than threads");
  std::uint64_t min_share = kDouble * (p.elements / p.threads);
  require(p.chunk <= min_share,
          fmt::format("polynomial: chunk {} exceeds the per-thread share of {} bytes", p.chunk, min_share));

  Trace t;
  t.regions.push_back(Region{0, kDouble * p.elements, "x"});
  BlockSink sink(p.threads);
  for (std::uint32_t th = 0; th < p.threads; ++th) {
    auto [lo, hi] = partition(p.elements, p.threads, th);
    for (std::uint64_t off = lo * kDouble; off < hi * kDouble; off += p.chunk) {
      std::uint64_t len = std::min(p.chunk, hi * kDouble - off);
      std::vector<AccessRun> runs{run(0, off, len, AccessKind::read)};
      if (p.streams == Streams::two) runs.push_back(run(0, off, len, AccessKind::write));
      sink.add(th, std::move(runs), 2ULL * p.degree * (len / kDouble));
    }
  }
  sink.flush_into(t.blocks);
  t.meta.name = "polynomial";
  t.meta.parameters = {{"elements", str(p.elements)},
                       {"degree", str(p.degree)},
                       {"streams", to_string(p.streams)},
                       {"threads", str(p.threads)},
                       {"chunk", str(p.chunk)}};
  finalize(t);
  return t;
}

Trace gen_stream(const StreamParams& p) {
  require(p.elements > 0, "stream: elements must be > 0");
  require(p.threads >= 1, "stream: threads must be >= 1");
  require(p.chunk > 0 && p.chunk % kDouble == 0, "stream: chunk must be a positive multiple of 8 bytes");
  require(p.elements >= p.threads, "stream: fewer elements than threads");
  std::uint64_t min_share = kDouble * (p.elements / p.threads);
  require(p.chunk <= min_share,
          fmt::format("stream: chunk {} exceeds the per-thread share of {} bytes", p.chunk, min_share));

  const bool three = p.kernel == StreamKernel::add || p.kernel == StreamKernel::triad;
  const std::uint64_t bytes = kDouble * p.elements;
  Trace t;
  t.regions.push_back(Region{0, bytes, "a"});
  t.regions.push_back(Region{1, bytes, "b"});
  if (three) t.regions.push_back(Region{2, bytes, "c"});

  // (sources, destination, FLOP per element)
  std::vector<RegionId> src;
  RegionId dst = 0;
  std::uint64_t flop_per_element = 0;
  switch (p.kernel) {
    case StreamKernel::copy: src = {0}; dst = 1; flop_per_element = 0; break;
    case StreamKernel::scale: src = {0}; dst = 1; flop_per_element = 1; break;
    case StreamKernel::add: src = {0, 1}; dst = 2; flop_per_element = 1; break;
    case StreamKernel::triad: src = {1, 2}; dst = 0; flop_per_element = 2; break;
  }

  BlockSink sink(p.threads);
  for (std::uint32_t th = 0; th < p.threads; ++th) {
    auto [lo, hi] = partition(p.elements, p.threads, th);
    for (std::uint64_t off = lo * kDouble; off < hi * kDouble; off += p.chunk) {
      std::uint64_t len = std::min(p.chunk, hi * kDouble - off);
      std::vector<AccessRun> runs;
      for (RegionId r : src) runs.push_back(run(r, off, len, AccessKind::read));
      runs.push_back(run(dst, off, len, AccessKind::write));
      sink.add(th, std::move(runs), flop_per_element * (len / kDouble));
    }
  }
  sink.flush_into(t.blocks);
  t.meta.name = "stream";
  t.meta.parameters = {{"kernel", to_string(p.kernel)},
                       {"elements", str(p.elements)},
                       {"threads", str(p.threads)},
                       {"chunk", str(p.chunk)}};
  finalize(t);
  return t;
}

Trace gen_gemm_tiled(const GemmParams& p) {
  require(p.element_size == 4 || p.element_size == 8, "gemm: element_size must be 4 or 8");
  require(p.tile > 0, "gemm: tile must be > 0");
  require(p.tile <= p.n, "gemm: tile exceeds matrix dimension");
  require(p.n % p.tile == 0, "gemm: tile must divide n");
  require(p.threads >= 1, "gemm: threads must be >= 1");

  const std::uint64_t tiles = p.n / p.tile;
  const std::uint64_t tile_bytes = p.tile * p.tile * p.element_size;
  const std::uint64_t matrix_bytes = p.n * p.n * p.element_size;
  const std::uint64_t block_flops = 2 * p.tile * p.tile * p.tile;
  auto at = [&](std::uint64_t i, std::uint64_t j) { return (i * tiles + j) * tile_bytes; };

  Trace t;
  t.regions = {Region{0, matrix_bytes, "A"}, Region{1, matrix_bytes, "B"}, Region{2, matrix_bytes, "C"}};
  BlockSink sink(p.threads);
  for (std::uint64_t i = 0; i < tiles; ++i) {
    for (std::uint64_t j = 0; j < tiles; ++j) {
      auto th = static_cast<ThreadId>((i * tiles + j) % p.threads);
      for (std::uint64_t k = 0; k < tiles; ++k) {
        std::vector<AccessRun> runs;
        if (k == 0) runs.push_back(run(2, at(i, j), tile_bytes, AccessKind::read));
        runs.push_back(run(0, at(i, k), tile_bytes, AccessKind::read));
        runs.push_back(run(1, at(k, j), tile_bytes, AccessKind::read));
        if (k + 1 == tiles) runs.push_back(run(2, at(i, j), tile_bytes, AccessKind::write));
        sink.add(th, std::move(runs), block_flops);
      }
    }
  }
  sink.flush_into(t.blocks);
  t.meta.name = "gemm";
  // FLOP per byte of one operand stream of a tile product (2 * tile / size).
  double per_stream = 2.0 * static_cast<double>(p.tile) / p.element_size;
  t.meta.parameters = {{"n", str(p.n)},
                       {"tile", str(p.tile)},
                       {"element_size", str(p.element_size)},
                       {"threads", str(p.threads)},
                       {"ai_per_stream", fmt::format("{}", per_stream)}};
  finalize(t);
  return t;
}

namespace {

Trace lu_naive(const LuParams& p) {
  const std::uint64_t n = p.n;
  Trace t;
  t.regions.push_back(Region{0, n * n * kDouble, "A"});
  // Blocks are already emitted in execution order, one per (step, thread).
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::uint64_t m = n - k;
    const auto groups = static_cast<std::uint32_t>(std::min<std::uint64_t>(p.threads, m));
    for (std::uint32_t q = 0; q < groups; ++q) {
      auto [c0, c1] = partition(m, groups, q);
      std::vector<AccessRun> runs;
      if (q == 0) {
        // Row interchange, charged as one row-length read and write.
        runs.push_back(run(0, k * n * kDouble, n * kDouble, AccessKind::read));
        runs.push_back(run(0, k * n * kDouble, n * kDouble, AccessKind::write));
      }
      const std::uint64_t cols = c1 - c0;
      const std::uint64_t first_col = k + c0;
      runs.push_back(strided(0, (first_col * n + k) * kDouble, m * kDouble, AccessKind::read, cols, n * kDouble));
      t.blocks.push_back(WorkBlock{q, std::move(runs), 2 * m * cols});
    }
  }
  t.meta.parameters = {{"pivot_model", "row-length read+write per step"}};
  return t;
}

Trace lu_tiled(const LuParams& p) {
  const std::uint64_t tiles = p.n / p.tile;
  const std::uint64_t tb = p.tile * p.tile * kDouble;
  const std::uint64_t t3 = p.tile * p.tile * p.tile;
  auto at = [&](std::uint64_t i, std::uint64_t j) { return (i * tiles + j) * tb; };
  auto rd = [&](std::uint64_t i, std::uint64_t j) { return run(0, at(i, j), tb, AccessKind::read); };
  auto wr = [&](std::uint64_t i, std::uint64_t j) { return run(0, at(i, j), tb, AccessKind::write); };

  Trace t;
  t.regions.push_back(Region{0, p.n * p.n * kDouble, "A"});
  std::uint64_t counter = 0;
  auto emit = [&](std::vector<AccessRun> runs, std::uint64_t flops) {
    auto th = static_cast<ThreadId>(counter++ % p.threads);
    t.blocks.push_back(WorkBlock{th, std::move(runs), flops});
  };
  for (std::uint64_t kk = 0; kk < tiles; ++kk) {
    emit({rd(kk, kk), wr(kk, kk)}, 2 * t3 / 3);
    for (std::uint64_t i = kk + 1; i < tiles; ++i) emit({rd(kk, kk), rd(i, kk), wr(i, kk)}, t3);
    for (std::uint64_t j = kk + 1; j < tiles; ++j) emit({rd(kk, kk), rd(kk, j), wr(kk, j)}, t3);
    for (std::uint64_t i = kk + 1; i < tiles; ++i)
      for (std::uint64_t j = kk + 1; j < tiles; ++j)
        emit({rd(i, kk), rd(kk, j), rd(i, j), wr(i, j)}, 2 * t3);
  }
  return t;
}

}  // namespace

Trace gen_lu(const LuParams& p) {
  require(p.n > 0, "lu: n must be > 0");
  require(p.threads >= 1, "lu: threads must be >= 1");
  if (p.variant == LuVariant::tiled) {
    require(p.tile > 0, "lu: tile must be > 0");
    require(p.n >= p.tile, "lu: n is too small for one tile");
    require(p.n % p.tile == 0, "lu: tile must divide n");
  }
  Trace t = p.variant == LuVariant::naive ? lu_naive(p) : lu_tiled(p);
  t.meta.name = "lu";
  t.meta.parameters["n"] = str(p.n);
  t.meta.parameters["variant"] = to_string(p.variant);
  t.meta.parameters["threads"] = str(p.threads);
  if (p.variant == LuVariant::tiled) t.meta.parameters["tile"] = str(p.tile);
  finalize(t);
  return t;
}

Trace gen_fft3d(const Fft3dParams& p) {
  require(p.n >= 2, "fft3d: n must be >= 2");
  require(p.threads >= 1, "fft3d: threads must be >= 1");
  const std::uint64_t n = p.n;
  const std::uint64_t row = kComplex * n;
  const std::uint64_t plane = row * n;
  // One block transforms a batch of n pencils.
  const auto batch_flops =
      static_cast<std::uint64_t>(std::llround(5.0 * static_cast<double>(n * n) * std::log2(static_cast<double>(n))));

  Trace t;
  t.regions.push_back(Region{0, plane * n, "grid"});
  BlockSink sink(p.threads);
  for (int pass = 1; pass <= 3; ++pass) {
    for (std::uint32_t th = 0; th < p.threads; ++th) {
      auto [lo, hi] = partition(n, p.threads, th);
      for (std::uint64_t b = lo; b < hi; ++b) {
        AccessRun r;
        if (pass == 1) {
          r = run(0, b * plane, plane, AccessKind::read);
        } else if (pass == 2) {
          r = strided(0, b * plane, row, AccessKind::read, n, row);
        } else {
          r = strided(0, b * row, row, AccessKind::read, n, plane);
        }
        AccessRun w = r;
        w.kind = AccessKind::write;
        sink.add(th, {r, w}, batch_flops);
      }
    }
    sink.flush_into(t.blocks);
  }
  t.meta.name = "fft3d";
  double per_footprint = 3.0 * static_cast<double>(batch_flops) * n / static_cast<double>(plane * n);
  t.meta.parameters = {{"n", str(n)},
                       {"threads", str(p.threads)},
                       {"flops_per_footprint_byte", fmt::format("{}", per_footprint)}};
  finalize(t);
  return t;
}

Trace gen_random(const RandomParams& p) {
  require(p.footprint > 0, "random: footprint must be > 0");
  require(p.touch_bytes > 0, "random: touch_bytes must be > 0");
  require(p.touch_bytes <= p.footprint, "random: touch_bytes exceeds footprint");
  require(p.ai >= 0 && std::isfinite(p.ai), "random: ai must be >= 0");
  require(p.threads >= 1, "random: threads must be >= 1");

  Trace t;
  t.regions.push_back(Region{0, p.footprint, "heap"});
  const std::uint64_t slots = (p.footprint - p.touch_bytes) / kRandomAlign + 1;
  const auto flops = static_cast<std::uint64_t>(std::llround(p.ai * static_cast<double>(p.touch_bytes)));
  // Raw engine output reduced modulo `slots`: the library distributions are
  // not specified bit-for-bit across standard library implementations.
  std::mt19937_64 rng(p.seed);
  for (std::uint64_t i = 0; i < p.touches; ++i) {
    std::uint64_t offset = kRandomAlign * (rng() % slots);
    auto th = static_cast<ThreadId>(i % p.threads);
    t.blocks.push_back(WorkBlock{th, {run(0, offset, p.touch_bytes, AccessKind::read)}, flops});
  }
  t.meta.name = "random";
  t.meta.parameters = {{"footprint", str(p.footprint)},
                       {"touches", str(p.touches)},
                       {"touch_bytes", str(p.touch_bytes)},
                       {"ai", fmt::format("{}", p.ai)},
                       {"threads", str(p.threads)},
                       {"seed", str(p.seed)}};
  finalize(t);
  return t;
}

}  // namespace tiersim::workloads
