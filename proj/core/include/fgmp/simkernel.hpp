/*
 * Copyright (c) 2026 The FGMP Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FGMP_SIMKERNEL_HPP
#define FGMP_SIMKERNEL_HPP

#include "fgmp/blockquant.hpp"
#include "fgmp/precision.hpp"
#include "fgmp/sensitivity.hpp"
#include "fgmp/tensor.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fgmp {

/// The four dot-product units in each VMAC lane, named weight x activation.
enum class DotUnitKind : std::uint8_t
{
  Fp4xFp4 = 0,
  Fp8xFp8 = 1,
  Fp4wFp8a = 2,
  Fp8wFp4a = 3,
};

inline constexpr std::size_t kDotUnitKinds = 4;
inline constexpr std::array<DotUnitKind, kDotUnitKinds> kAllDotUnits{
  DotUnitKind::Fp4xFp4, DotUnitKind::Fp8xFp8, DotUnitKind::Fp4wFp8a, DotUnitKind::Fp8wFp4a};

const char *to_string(DotUnitKind k) noexcept;

constexpr DotUnitKind dot_unit_for(Precision weight, Precision activation) noexcept
{
  if (weight == Precision::NvFp4)
    return activation == Precision::NvFp4 ? DotUnitKind::Fp4xFp4 : DotUnitKind::Fp4wFp8a;
  return activation == Precision::NvFp4 ? DotUnitKind::Fp8wFp4a : DotUnitKind::Fp8xFp8;
}

struct CycleRecord
{
  std::uint64_t cycle = 0;
  std::uint32_t lane = 0;
  Precision weight = Precision::NvFp4;
  Precision activation = Precision::NvFp4;
  DotUnitKind unit = DotUnitKind::Fp4xFp4;

  friend bool operator==(const CycleRecord &, const CycleRecord &) = default;
};

/// Block-op accounting for one or more GEMMs (and their PPU passes).
struct GemmTrace
{
  // Shape of the producing GEMM; zero after merging traces of different shapes.
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  /// Arithmetic operations, 2 per multiply-accumulate.
  std::uint64_t ops = 0;
  std::uint64_t cycles = 0;
  std::array<std::uint64_t, kDotUnitKinds> block_ops{};
  std::uint64_t ppu_invocations = 0;
  /// Per-lane, per-cycle unit activity (only when requested).
  std::vector<CycleRecord> records;

  std::uint64_t count(DotUnitKind k) const noexcept { return block_ops[static_cast<std::size_t>(k)]; }
  std::uint64_t total_block_ops() const noexcept;

  /// Additive merge; per-cycle records are concatenated.
  GemmTrace &operator+=(const GemmTrace &other);

  friend bool operator==(const GemmTrace &, const GemmTrace &) = default;
};

/// 16-wide dot product on dequantized values: binary32 products summed in
/// binary32 in ascending index order. Throws fgmp::Error unless both spans
/// hold exactly kBlockSize values.
float vmac_dot(std::span<const float> w, std::span<const float> a);

struct BlockDot
{
  float partial_sum = 0.0f;
  DotUnitKind unit = DotUnitKind::Fp4xFp4;
};

/// Dequantizes both tagged blocks (microscale and tensor scale folded in) and
/// computes their partial sum on the unit selected by the metadata bits.
BlockDot block_dot(const QuantizedBlock &w, float w_fp8_scale, const QuantizedBlock &a, float a_fp8_scale);

struct GemmOptions
{
  /// Parallel VMAC lanes; one weight block per lane is held stationary.
  std::uint32_t lanes = 16;
  unsigned threads = 1;
  /// Record per-cycle lane activity. Forces single-threaded execution.
  bool record_cycles = false;
};

struct GemmResult
{
  /// Token-major output [N x M]: row n holds the M output channels of token n.
  Tensor y;
  GemmTrace trace;
};

/// Y = X W^T for weights W [M x K] and token-major activations X [N x K].
///
/// Weight-stationary: for each tile of `lanes` weight rows and each K block the
/// weight blocks stay resident while the N activation blocks stream past, one
/// per cycle, broadcast to all lanes. Each output accumulates its K-block
/// partial sums in ascending K order in binary32.
/// Throws fgmp::Error if the inner dimensions differ.
GemmResult gemm_fgmp(const QuantizedTensor &w, const QuantizedTensor &x, const GemmOptions &options = {});

/// Post-processing unit: quantizes a GEMM output to mixed precision against a
/// fixed activation threshold (one invocation per 16-value output block).
/// Invocations are added to `trace` when given.
QuantizedTensor ppu_pipeline(const Tensor &y, const FisherMap &g2_channels, const Threshold &t,
                             float fp8_scale, GemmTrace *trace = nullptr);

/// Key/value text record of a trace's counters (per-cycle records excluded).
std::string format_trace(const GemmTrace &trace);
/// Inverse of format_trace. Throws fgmp::FormatError on unknown keys,
/// duplicates, missing counters or malformed numbers.
GemmTrace parse_trace(std::string_view text);

} // namespace fgmp

#endif // FGMP_SIMKERNEL_HPP
