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

#include "fgmp/costmodel.hpp"

#include "fgmp/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fgmp {

double EnergyCoefficients::for_unit(DotUnitKind k) const noexcept
{
  switch (k)
  {
    case DotUnitKind::Fp4xFp4:
      return e44;
    case DotUnitKind::Fp8xFp8:
      return e88;
    case DotUnitKind::Fp4wFp8a:
      return e48;
    case DotUnitKind::Fp8wFp4a:
      return e84;
  }
  return e88;
}

void EnergyCoefficients::validate() const
{
  for (double v : {e88, e44, e48, e84, ppu_pj_per_block})
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error("energy coefficients must be positive and finite");
  if (!(mux_tax >= 0.0) || !std::isfinite(mux_tax))
    throw Error("mux_tax must be nonnegative and finite");
  if (!(e44 < e48 && e44 < e84 && e48 < e88 && e84 < e88))
    throw Error("energy coefficients must satisfy e44 < e48, e84 < e88");
}

std::uint64_t MemoryBreakdown::element_bits() const noexcept
{
  return nvfp4_blocks * kBlockSize * 4 + fp8_blocks * kBlockSize * 8;
}

std::uint64_t MemoryBreakdown::total_bits() const noexcept
{
  return nvfp4_blocks * kNvFp4BlockBits + fp8_blocks * kFp8BlockBits;
}

double MemoryBreakdown::savings() const noexcept
{
  if (blocks() == 0)
    return 0.0;
  return 1.0 - static_cast<double>(total_bits()) / static_cast<double>(baseline_bits());
}

double MemoryBreakdown::avg_bits_per_element() const noexcept
{
  if (blocks() == 0)
    return 0.0;
  return static_cast<double>(total_bits()) / static_cast<double>(blocks() * kBlockSize);
}

double MemoryBreakdown::compression_rate() const noexcept
{
  const double avg = avg_bits_per_element();
  return avg > 0.0 ? 16.0 / avg : 0.0;
}

MemoryBreakdown &MemoryBreakdown::operator+=(const MemoryBreakdown &o) noexcept
{
  nvfp4_blocks += o.nvfp4_blocks;
  fp8_blocks += o.fp8_blocks;
  return *this;
}

MemoryBreakdown memory_bits(const QuantizedTensor &qt)
{
  return {qt.count(Precision::NvFp4), qt.count(Precision::Fp8)};
}

double memory_savings_for_ratio(double fp4_ratio) noexcept
{
  const double bits = fp4_ratio * static_cast<double>(kNvFp4BlockBits) +
                      (1.0 - fp4_ratio) * static_cast<double>(kFp8BlockBits);
  return 1.0 - bits / static_cast<double>(kBaselineFp8BlockBits);
}

double datapath_energy(const GemmTrace &trace, const EnergyCoefficients &coeff)
{
  const std::uint64_t total = trace.total_block_ops();
  if (total == 0)
    return 0.0;
  double energy = 0.0;
  for (DotUnitKind k : kAllDotUnits)
    energy += static_cast<double>(trace.count(k)) * coeff.for_unit(k);
  const std::uint64_t mixed = trace.count(DotUnitKind::Fp4wFp8a) + trace.count(DotUnitKind::Fp8wFp4a);
  energy += coeff.mux_tax * static_cast<double>(mixed);
  return energy / (static_cast<double>(total) * coeff.e88);
}

PpuEnergy ppu_energy(const GemmTrace &trace, const EnergyCoefficients &coeff) noexcept
{
  PpuEnergy e;
  e.picojoules = static_cast<double>(trace.ppu_invocations) * coeff.ppu_pj_per_block;
  if (trace.ops > 0)
    e.femtojoules_per_op = e.picojoules * 1000.0 / static_cast<double>(trace.ops);
  return e;
}

CostReport make_report(const GemmTrace &trace, const EnergyCoefficients &coeff,
                       std::optional<MemoryBreakdown> memory)
{
  CostReport r;
  r.trace = trace;
  r.trace.records.clear();
  r.coefficients = coeff;
  r.memory = memory;
  r.relative_energy = datapath_energy(trace, coeff);
  r.ppu = ppu_energy(trace, coeff);
  return r;
}

std::string format_report_table(const CostReport &r)
{
  std::string out;
  const double total = static_cast<double>(r.trace.total_block_ops());
  out += fmt::format("{:<24}{:>16}{:>10}\n", "dot unit", "block-ops", "share");
  for (DotUnitKind k : kAllDotUnits)
  {
    const auto c = r.trace.count(k);
    out += fmt::format("{:<24}{:>16}{:>9.2f}%\n", to_string(k), c,
                       total > 0 ? 100.0 * static_cast<double>(c) / total : 0.0);
  }
  out += fmt::format("{:<24}{:>16}\n", "total", r.trace.total_block_ops());
  out += fmt::format("{:<24}{:>16.4f}\n", "relative energy", r.relative_energy);
  out += fmt::format("{:<24}{:>16}\n", "ppu invocations", r.trace.ppu_invocations);
  out += fmt::format("{:<24}{:>16.3f}\n", "ppu energy (pJ)", r.ppu.picojoules);
  out += fmt::format("{:<24}{:>16.4f}\n", "ppu energy (fJ/op)", r.ppu.femtojoules_per_op);
  if (r.memory)
  {
    const MemoryBreakdown &m = *r.memory;
    out += fmt::format("{:<24}{:>16}\n", "nvfp4 blocks", m.nvfp4_blocks);
    out += fmt::format("{:<24}{:>16}\n", "fp8 blocks", m.fp8_blocks);
    out += fmt::format("{:<24}{:>16}\n", "element bits", m.element_bits());
    out += fmt::format("{:<24}{:>16}\n", "scale bits", m.scale_bits());
    out += fmt::format("{:<24}{:>16}\n", "metadata bits", m.metadata_bits());
    out += fmt::format("{:<24}{:>16}\n", "total bits", m.total_bits());
    out += fmt::format("{:<24}{:>15.2f}%\n", "savings vs fp8", 100.0 * m.savings());
    out += fmt::format("{:<24}{:>16.4f}\n", "avg bits/element", m.avg_bits_per_element());
    out += fmt::format("{:<24}{:>16.4f}\n", "compression rate", m.compression_rate());
  }
  return out;
}

std::string format_report_records(const CostReport &r)
{
  std::string out;
  for (DotUnitKind k : kAllDotUnits)
    out += fmt::format("block_ops.{}={}\n", to_string(k), r.trace.count(k));
  out += fmt::format("block_ops.total={}\n", r.trace.total_block_ops());
  out += fmt::format("ops={}\n", r.trace.ops);
  out += fmt::format("relative_energy={:.17g}\n", r.relative_energy);
  out += fmt::format("ppu_invocations={}\n", r.trace.ppu_invocations);
  out += fmt::format("ppu_energy_pj={:.17g}\n", r.ppu.picojoules);
  out += fmt::format("ppu_energy_fj_per_op={:.17g}\n", r.ppu.femtojoules_per_op);
  if (r.memory)
  {
    const MemoryBreakdown &m = *r.memory;
    out += fmt::format("memory.nvfp4_blocks={}\n", m.nvfp4_blocks);
    out += fmt::format("memory.fp8_blocks={}\n", m.fp8_blocks);
    out += fmt::format("memory.total_bits={}\n", m.total_bits());
    out += fmt::format("memory.baseline_bits={}\n", m.baseline_bits());
    out += fmt::format("memory.savings_percent={:.17g}\n", 100.0 * m.savings());
    out += fmt::format("memory.avg_bits_per_element={:.17g}\n", m.avg_bits_per_element());
    out += fmt::format("memory.compression_rate={:.17g}\n", m.compression_rate());
  }
  return out;
}

} // namespace fgmp
