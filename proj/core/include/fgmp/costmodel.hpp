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

#ifndef FGMP_COSTMODEL_HPP
#define FGMP_COSTMODEL_HPP

#include "fgmp/blockquant.hpp"
#include "fgmp/simkernel.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fgmp {

/// Bits per stored block.
inline constexpr std::uint64_t kNvFp4BlockBits = kBlockSize * 4 + 8 + 1;
inline constexpr std::uint64_t kFp8BlockBits = kBlockSize * 8 + 1;
inline constexpr std::uint64_t kBaselineFp8BlockBits = kBlockSize * 8;

/// Energy per block-dot relative to the FP8 x FP8 unit, plus absolute PPU cost.
struct EnergyCoefficients
{
  double e88 = 1.00;
  double e44 = 0.67;
  /// FP4 weights x FP8 activations.
  double e48 = 0.84;
  /// FP8 weights x FP4 activations.
  double e84 = 0.83;
  /// Extra relative energy per block-op on a mixed FP4/FP8 unit.
  double mux_tax = 0.0;
  double ppu_pj_per_block = 25.7;

  double for_unit(DotUnitKind k) const noexcept;
  /// Throws fgmp::Error unless all coefficients are positive (mux_tax
  /// nonnegative) and e44 < e48, e84 < e88.
  void validate() const;

  friend bool operator==(const EnergyCoefficients &, const EnergyCoefficients &) = default;
};

struct MemoryBreakdown
{
  std::uint64_t nvfp4_blocks = 0;
  std::uint64_t fp8_blocks = 0;

  std::uint64_t blocks() const noexcept { return nvfp4_blocks + fp8_blocks; }
  std::uint64_t element_bits() const noexcept;
  std::uint64_t scale_bits() const noexcept { return nvfp4_blocks * 8; }
  std::uint64_t metadata_bits() const noexcept { return blocks(); }
  std::uint64_t total_bits() const noexcept;
  /// Same elements stored as plain FP8 without metadata.
  std::uint64_t baseline_bits() const noexcept { return blocks() * kBaselineFp8BlockBits; }
  /// 1 - total / baseline (fraction, negative when larger than the baseline).
  double savings() const noexcept;
  double avg_bits_per_element() const noexcept;
  /// 16 / average bit width.
  double compression_rate() const noexcept;

  MemoryBreakdown &operator+=(const MemoryBreakdown &o) noexcept;
};

MemoryBreakdown memory_bits(const QuantizedTensor &qt);

/// Savings fraction of an assignment with `fp4_ratio` of its blocks in NVFP4.
double memory_savings_for_ratio(double fp4_ratio) noexcept;

/// Datapath energy relative to running the same block-ops on the FP8 unit.
/// Zero for an empty trace.
double datapath_energy(const GemmTrace &trace, const EnergyCoefficients &coeff);

struct PpuEnergy
{
  double picojoules = 0.0;
  double femtojoules_per_op = 0.0;
};

/// invocations x ppu_pj_per_block, and that spread over the trace's 2*M*N*K ops.
PpuEnergy ppu_energy(const GemmTrace &trace, const EnergyCoefficients &coeff) noexcept;

struct CostReport
{
  GemmTrace trace;
  EnergyCoefficients coefficients;
  std::optional<MemoryBreakdown> memory;
  double relative_energy = 0.0;
  PpuEnergy ppu;
};

CostReport make_report(const GemmTrace &trace, const EnergyCoefficients &coeff,
                       std::optional<MemoryBreakdown> memory = std::nullopt);

/// Human-readable table.
std::string format_report_table(const CostReport &report);
/// One key=value record per line.
std::string format_report_records(const CostReport &report);

} // namespace fgmp

#endif // FGMP_COSTMODEL_HPP
