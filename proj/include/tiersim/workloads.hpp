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

#include "tiersim/trace.hpp"

// Deterministic trace generators for the benchmark kernels. Every generator
// is a pure function of its parameters, emits blocks round-robin across
// threads (so list order approximates concurrent execution), and fills meta
// via finalize(). All parameter errors throw ConfigError.
namespace tiersim::workloads {

enum class Streams { one, two };
enum class StreamKernel { copy, scale, add, triad };
enum class LuVariant { naive, tiled };

const char* to_string(Streams s);
const char* to_string(StreamKernel k);
const char* to_string(LuVariant v);
Streams streams_from_string(const std::string& s);
StreamKernel stream_kernel_from_string(const std::string& s);
LuVariant lu_variant_from_string(const std::string& s);

// Horner evaluation of a degree-d polynomial over an array of doubles:
// 2*d FLOP per element, one read stream, plus an in-place write stream for
// Streams::two.
struct PolynomialParams {
  std::uint64_t elements = 0;
  std::uint32_t degree = 0;
  Streams streams = Streams::one;
  std::uint32_t threads = 1;
  std::uint64_t chunk = 1 << 20;  // bytes per block, multiple of 8
};
Trace gen_polynomial(const PolynomialParams& p);

struct StreamParams {
  StreamKernel kernel = StreamKernel::copy;
  std::uint64_t elements = 0;
  std::uint32_t threads = 1;
  std::uint64_t chunk = 1 << 20;
};
Trace gen_stream(const StreamParams& p);

// Tile-by-tile C += A*B with tile-contiguous storage.
struct GemmParams {
  std::uint64_t n = 0;
  std::uint64_t tile = 0;
  std::uint32_t element_size = 8;  // 4 or 8
  std::uint32_t threads = 1;
};
Trace gen_gemm_tiled(const GemmParams& p);

// naive: column-major dense LU with one block per (step, thread) sweeping
// the trailing columns, plus a row-length read+write per step for the pivot
// interchange. tiled: right-looking tile algorithm on tile-contiguous
// storage.
struct LuParams {
  std::uint64_t n = 0;
  LuVariant variant = LuVariant::tiled;
  std::uint64_t tile = 0;  // ignored for naive
  std::uint32_t threads = 1;
};
Trace gen_lu(const LuParams& p);

// Three 1-D passes over an n^3 grid of complex doubles, 5*n*log2(n) FLOP per
// transform. Each pass reads and writes every element once.
struct Fft3dParams {
  std::uint64_t n = 0;
  std::uint32_t threads = 1;
};
Trace gen_fft3d(const Fft3dParams& p);

// Random page-aligned touches (4 KiB alignment) of `touch_bytes` each.
struct RandomParams {
  std::uint64_t footprint = 0;
  std::uint64_t touches = 0;
  std::uint64_t touch_bytes = 4096;
  double ai = 0.0;  // FLOP per touched byte
  std::uint32_t threads = 1;
  std::uint64_t seed = 1;
};
Trace gen_random(const RandomParams& p);

}  // namespace tiersim::workloads
