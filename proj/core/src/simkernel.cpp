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

#include "fgmp/simkernel.hpp"

#include "fgmp/assignment.hpp"
#include "fgmp/error.hpp"
#include "fgmp/parallel.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

namespace fgmp {

namespace {

BlockValues dequantize_block(const QuantizedBlock &b, float fp8_scale) noexcept
{
  if (const auto *fp4 = std::get_if<NvFp4Block>(&b))
    return fp4->dequantize();
  return std::get<Fp8Block>(b).dequantize(fp8_scale);
}

float dot16(const BlockValues &w, const BlockValues &a) noexcept
{
  float acc = 0.0f;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    acc += w[i] * a[i];
  return acc;
}

} // namespace

const char *to_string(DotUnitKind k) noexcept
{
  switch (k)
  {
    case DotUnitKind::Fp4xFp4:
      return "fp4xfp4";
    case DotUnitKind::Fp8xFp8:
      return "fp8xfp8";
    case DotUnitKind::Fp4wFp8a:
      return "fp4w_fp8a";
    case DotUnitKind::Fp8wFp4a:
      return "fp8w_fp4a";
  }
  return "?";
}

std::uint64_t GemmTrace::total_block_ops() const noexcept
{
  return std::accumulate(block_ops.begin(), block_ops.end(), std::uint64_t{0});
}

GemmTrace &GemmTrace::operator+=(const GemmTrace &other)
{
  if (m != other.m || k != other.k || n != other.n)
    m = k = n = 0;
  ops += other.ops;
  cycles += other.cycles;
  for (std::size_t i = 0; i < kDotUnitKinds; ++i)
    block_ops[i] += other.block_ops[i];
  ppu_invocations += other.ppu_invocations;
  records.insert(records.end(), other.records.begin(), other.records.end());
  return *this;
}

float vmac_dot(std::span<const float> w, std::span<const float> a)
{
  if (w.size() != kBlockSize || a.size() != kBlockSize)
    throw Error("vmac_dot: operands must both hold " + std::to_string(kBlockSize) + " values");
  float acc = 0.0f;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    acc += w[i] * a[i];
  return acc;
}

BlockDot block_dot(const QuantizedBlock &w, float w_fp8_scale, const QuantizedBlock &a, float a_fp8_scale)
{
  return {dot16(dequantize_block(w, w_fp8_scale), dequantize_block(a, a_fp8_scale)),
          dot_unit_for(precision_of(w), precision_of(a))};
}

GemmResult gemm_fgmp(const QuantizedTensor &w, const QuantizedTensor &x, const GemmOptions &options)
{
  w.validate();
  x.validate();
  if (w.cols != x.cols)
    throw Error("gemm_fgmp: inner dimensions differ (weights K=" + std::to_string(w.cols) +
                ", activations K=" + std::to_string(x.cols) + ")");
  if (options.lanes == 0)
    throw Error("gemm_fgmp: lane count must be positive");

  const std::size_t M = w.rows;
  const std::size_t N = x.rows;
  const std::size_t KB = w.blocks_per_row();
  const std::size_t L = options.lanes;
  const std::size_t tiles = (M + L - 1) / L;

  GemmResult result;
  result.y = Tensor(N, M, Role::Activation);
  result.trace.m = M;
  result.trace.k = w.cols;
  result.trace.n = N;
  result.trace.ops = 2ull * M * N * w.cols;
  result.trace.cycles = static_cast<std::uint64_t>(tiles) * KB * N;

  // Activation blocks are shared by every tile; dequantize once up front.
  std::vector<BlockValues> x_values(x.block_count());
  for (std::size_t j = 0; j < x.block_count(); ++j)
    x_values[j] = dequantize_block(x.blocks[j], x.fp8_tensor_scale);

  std::mutex merge;
  auto run_tiles = [&](std::size_t tile_begin, std::size_t tile_end) {
    GemmTrace local;
    std::vector<BlockValues> stationary(L);
    std::vector<Precision> lane_fmt(L);
    for (std::size_t tile = tile_begin; tile < tile_end; ++tile)
    {
      const std::size_t m0 = tile * L;
      const std::size_t lanes_used = std::min(L, M - m0);
      for (std::size_t kb = 0; kb < KB; ++kb)
      {
        for (std::size_t lane = 0; lane < lanes_used; ++lane)
        {
          const auto &blk = w.blocks[(m0 + lane) * KB + kb];
          stationary[lane] = dequantize_block(blk, w.fp8_tensor_scale);
          lane_fmt[lane] = precision_of(blk);
        }
        for (std::size_t n = 0; n < N; ++n)
        {
          const std::size_t xj = n * KB + kb;
          const Precision a_fmt = precision_of(x.blocks[xj]);
          const BlockValues &a = x_values[xj];
          const std::uint64_t cycle = (static_cast<std::uint64_t>(tile) * KB + kb) * N + n;
          for (std::size_t lane = 0; lane < lanes_used; ++lane)
          {
            const DotUnitKind unit = dot_unit_for(lane_fmt[lane], a_fmt);
            ++local.block_ops[static_cast<std::size_t>(unit)];
            result.y(n, m0 + lane) += dot16(stationary[lane], a);
            if (options.record_cycles)
              local.records.push_back({cycle, static_cast<std::uint32_t>(lane), lane_fmt[lane], a_fmt, unit});
          }
        }
      }
    }
    std::lock_guard lock(merge);
    for (std::size_t i = 0; i < kDotUnitKinds; ++i)
      result.trace.block_ops[i] += local.block_ops[i];
    result.trace.records.insert(result.trace.records.end(), local.records.begin(), local.records.end());
  };

  const unsigned threads = options.record_cycles ? 1u : options.threads;
  parallel_for(tiles, threads, run_tiles);
  return result;
}

QuantizedTensor ppu_pipeline(const Tensor &y, const FisherMap &g2_channels, const Threshold &t,
                             float fp8_scale, GemmTrace *trace)
{
  OnlineQuantization q = assign_online(y, g2_channels, t, fp8_scale);
  if (trace != nullptr)
    trace->ppu_invocations += q.tensor.block_count();
  return std::move(q.tensor);
}

} // namespace fgmp
