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

#include "fgmp/assignment.hpp"
#include "fgmp/error.hpp"
#include "fgmp/simkernel.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fgmp;

namespace {

QuantizedTensor random_quantized(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double fp8_p,
                                 Role role = Role::Weight)
{
  const Tensor t = oracle::random_tensor(rng, rows, cols, 1.0f, 0.02f, 20.0f, role);
  const auto a = oracle::random_assignment(rng, t.block_count(), fp8_p);
  return build_quantized(t, a, ScoreWeights::uniform(), ClipMode::DynMax, fp8_tensor_scale(t.data()));
}

Threshold at(double v)
{
  Threshold t;
  t.value = v;
  return t;
}

} // namespace

TEST(BlockDot, ZeroActivation)
{
  std::mt19937_64 rng(1);
  const QuantizedTensor zero = quantize_all_nvfp4(Tensor(1, 16));
  for (int t = 0; t < 20; ++t)
  {
    const auto w = random_quantized(rng, 1, 16, 0.5);
    EXPECT_EQ(block_dot(w.blocks[0], w.fp8_tensor_scale, zero.blocks[0], 1.0f).partial_sum, 0.0f);
  }
}

TEST(BlockDot, OnesGiveSixteen)
{
  const Tensor ones(1, 16, std::vector<float>(16, 1.0f));
  NvFp4Block w;
  w.codes.fill(oracle::fp4_encode(1.0f));
  w.scale = kFp8One;
  const auto x = quantize_all_fp8(ones);
  const BlockDot d = block_dot(w, 1.0f, x.blocks[0], x.fp8_tensor_scale);
  EXPECT_EQ(d.partial_sum, 16.0f);
  EXPECT_EQ(d.unit, DotUnitKind::Fp4wFp8a);
}

TEST(BlockDot, UnitSelection)
{
  EXPECT_EQ(dot_unit_for(Precision::NvFp4, Precision::NvFp4), DotUnitKind::Fp4xFp4);
  EXPECT_EQ(dot_unit_for(Precision::Fp8, Precision::Fp8), DotUnitKind::Fp8xFp8);
  EXPECT_EQ(dot_unit_for(Precision::NvFp4, Precision::Fp8), DotUnitKind::Fp4wFp8a);
  EXPECT_EQ(dot_unit_for(Precision::Fp8, Precision::NvFp4), DotUnitKind::Fp8wFp4a);
}

TEST(BlockDot, MatchesScalarReference)
{
  std::mt19937_64 rng(2);
  for (int t = 0; t < 500; ++t)
  {
    const auto w = random_quantized(rng, 1, 16, 0.5);
    const auto x = random_quantized(rng, 1, 16, 0.5, Role::Activation);
    const auto wv = dequantize(w);
    const auto xv = dequantize(x);
    float expect = 0.0f;
    for (std::size_t i = 0; i < 16; ++i)
      expect += wv(0, i) * xv(0, i);
    const BlockDot d = block_dot(w.blocks[0], w.fp8_tensor_scale, x.blocks[0], x.fp8_tensor_scale);
    EXPECT_TRUE(oracle::bitwise_equal(std::span<const float>(&d.partial_sum, 1), std::span<const float>(&expect, 1)));
    EXPECT_EQ(d.unit, dot_unit_for(precision_of(w.blocks[0]), precision_of(x.blocks[0])));
    EXPECT_EQ(vmac_dot(wv.row(0), xv.row(0)), d.partial_sum);
  }
}

TEST(BlockDot, LengthErrors)
{
  const std::vector<float> a(16, 1.0f), b(15, 1.0f), c(17, 1.0f);
  EXPECT_THROW(vmac_dot(a, b), Error);
  EXPECT_THROW(vmac_dot(c, a), Error);
  EXPECT_EQ(vmac_dot(a, a), 16.0f);
}

TEST(Gemm, AllFp8MatchesReference)
{
  std::mt19937_64 rng(3);
  const auto w = random_quantized(rng, 16, 16, 1.0);
  const auto x = random_quantized(rng, 16, 16, 1.0, Role::Activation);
  const GemmResult r = gemm_fgmp(w, x);
  EXPECT_TRUE(oracle::bitwise_equal(r.y.data(), oracle::reference_gemm(w, x).data()));
  EXPECT_EQ(r.trace.count(DotUnitKind::Fp8xFp8), 256u);
}

TEST(Gemm, IdentityWeightsSelectActivations)
{
  // Unit-scale NVFP4 blocks hold the identity exactly (dynmax would pick 1/6).
  std::mt19937_64 rng(4);
  const std::size_t k = 32;
  QuantizedTensor w{k, k, {}, 1.0f};
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t kb = 0; kb < k / 16; ++kb)
    {
      NvFp4Block b;
      b.scale = kFp8One;
      if (r / 16 == kb)
        b.codes[r % 16] = oracle::fp4_encode(1.0f);
      w.blocks.emplace_back(b);
    }
  ASSERT_EQ(dequantize(w).data()[0], 1.0f);
  const auto x = random_quantized(rng, 5, k, 0.4, Role::Activation);
  const GemmResult r = gemm_fgmp(w, x);
  const Tensor xd = dequantize(x);
  // Compared by value: a -0 activation comes out as +0 after accumulation.
  for (std::size_t i = 0; i < xd.size(); ++i)
    EXPECT_EQ(r.y.data()[i], xd.data()[i]) << i;
}

TEST(Gemm, RandomInstancesBitExactWithCounts)
{
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  std::uniform_int_distribution<std::size_t> kblocks(1, 4);
  for (int t = 0; t < 60; ++t)
  {
    const std::size_t M = dim(rng), N = dim(rng), K = 16 * kblocks(rng);
    const double pw = std::uniform_real_distribution<double>(0, 1)(rng);
    const double px = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto w = random_quantized(rng, M, K, pw);
    const auto x = random_quantized(rng, N, K, px, Role::Activation);
    const GemmResult r = gemm_fgmp(w, x);
    ASSERT_EQ(r.y.rows(), N);
    ASSERT_EQ(r.y.cols(), M);
    EXPECT_TRUE(oracle::bitwise_equal(r.y.data(), oracle::reference_gemm(w, x).data())) << "trial " << t;
    EXPECT_EQ(r.trace.block_ops, oracle::count_unit_ops(w, x));
    EXPECT_EQ(r.trace.total_block_ops(), M * N * K / 16);
    EXPECT_EQ(r.trace.ops, 2 * M * N * K);
    EXPECT_EQ(r.trace.cycles, ((M + 15) / 16) * (K / 16) * N);
  }
}

TEST(Gemm, LanesAndThreadsDoNotChangeResults)
{
  std::mt19937_64 rng(6);
  const auto w = random_quantized(rng, 37, 64, 0.3);
  const auto x = random_quantized(rng, 23, 64, 0.3, Role::Activation);
  const GemmResult base = gemm_fgmp(w, x);
  for (std::uint32_t lanes : {1u, 3u, 16u, 64u})
    for (unsigned threads : {1u, 4u})
    {
      const GemmResult r = gemm_fgmp(w, x, {lanes, threads, false});
      EXPECT_TRUE(oracle::bitwise_equal(r.y.data(), base.y.data()));
      EXPECT_EQ(r.trace.block_ops, base.trace.block_ops);
    }
}

TEST(Gemm, CycleRecords)
{
  std::mt19937_64 rng(7);
  const auto w = random_quantized(rng, 20, 32, 0.5);
  const auto x = random_quantized(rng, 3, 32, 0.5, Role::Activation);
  const GemmResult r = gemm_fgmp(w, x, {16, 4, true});
  ASSERT_EQ(r.trace.records.size(), r.trace.total_block_ops());
  std::array<std::uint64_t, kDotUnitKinds> counts{};
  for (const CycleRecord &c : r.trace.records)
  {
    EXPECT_LT(c.lane, 16u);
    EXPECT_LT(c.cycle, r.trace.cycles);
    EXPECT_EQ(c.unit, dot_unit_for(c.weight, c.activation));
    ++counts[static_cast<std::size_t>(c.unit)];
  }
  EXPECT_EQ(counts, r.trace.block_ops);
}

TEST(Gemm, DimensionMismatch)
{
  std::mt19937_64 rng(8);
  EXPECT_THROW(gemm_fgmp(random_quantized(rng, 4, 32, 0.5), random_quantized(rng, 4, 16, 0.5)), Error);
}

TEST(Ppu, InfiniteThresholdAndZeroOutput)
{
  std::mt19937_64 rng(9);
  const Tensor y = oracle::random_tensor(rng, 4, 32, 1.0f, 0.05f, 30.0f, Role::Activation);
  const FisherMap g(oracle::random_sensitivity(rng, 32));
  GemmTrace trace;
  const auto q = ppu_pipeline(y, g, at(INFINITY), fp8_tensor_scale(y.data()), &trace);
  EXPECT_EQ(q.count(Precision::Fp8), 0u);
  EXPECT_EQ(trace.ppu_invocations, 8u);

  const auto z = ppu_pipeline(Tensor(4, 32, Role::Activation), g, at(0.0), 1.0f);
  EXPECT_EQ(z.count(Precision::Fp8), 0u);
  for (const auto &b : z.blocks)
    for (Fp4Code c : std::get<NvFp4Block>(b).codes)
      EXPECT_EQ(decode_fp4(c), 0.0f);
}

TEST(Ppu, ChainedLayersMatchOfflinePipeline)
{
  std::mt19937_64 rng(10);
  const std::size_t N = 8, K0 = 32, M1 = 48, M2 = 16;
  const auto w1 = random_quantized(rng, M1, K0, 0.2);
  const auto w2 = random_quantized(rng, M2, M1, 0.2);
  const auto x = random_quantized(rng, N, K0, 0.2, Role::Activation);
  const FisherMap g(oracle::random_sensitivity(rng, M1));

  // Layer 1 with the PPU in the loop.
  GemmResult l1 = gemm_fgmp(w1, x);
  const float scale = fp8_tensor_scale(l1.y.data());
  const auto pool = score_blocks(l1.y, ScoreWeights::fisher(g), ClipMode::DynMax, scale);
  const Threshold thr = at(percentile_nearest_rank(pool, 0.75));
  const auto x2 = ppu_pipeline(l1.y, g, thr, scale, &l1.trace);
  EXPECT_EQ(l1.trace.ppu_invocations, M1 * N / 16);
  const GemmResult l2 = gemm_fgmp(w2, x2);

  // Offline: score, assign, build, then run layer 2.
  const auto offline = build_quantized(l1.y, assign_precision(pool, thr), ScoreWeights::fisher(g), ClipMode::DynMax, scale);
  EXPECT_EQ(x2, offline);
  EXPECT_TRUE(oracle::bitwise_equal(l2.y.data(), oracle::reference_gemm(w2, offline).data()));
}

TEST(Trace, MergeIsAdditive)
{
  GemmTrace a;
  a.m = 16;
  a.k = 32;
  a.n = 4;
  a.ops = 10;
  a.block_ops = {1, 2, 3, 4};
  a.ppu_invocations = 5;
  GemmTrace b = a;
  b += a;
  EXPECT_EQ(b.m, 16u);
  EXPECT_EQ(b.ops, 20u);
  EXPECT_EQ(b.block_ops, (std::array<std::uint64_t, 4>{2, 4, 6, 8}));
  EXPECT_EQ(b.ppu_invocations, 10u);
  GemmTrace c = a;
  c.n = 8;
  c += a;
  EXPECT_EQ(c.m, 0u);
  EXPECT_EQ(c.n, 0u);
}

TEST(Trace, TextRoundTrip)
{
  std::mt19937_64 rng(11);
  const auto w = random_quantized(rng, 20, 48, 0.3);
  const auto x = random_quantized(rng, 7, 48, 0.6, Role::Activation);
  GemmTrace t = gemm_fgmp(w, x).trace;
  t.ppu_invocations = 9;
  const std::string text = format_trace(t);
  EXPECT_EQ(parse_trace(text), t);
  EXPECT_EQ(format_trace(parse_trace(text)), text);
}

TEST(Trace, ParseErrors)
{
  GemmTrace t;
  t.block_ops = {1, 2, 3, 4};
  const std::string good = format_trace(t);
  EXPECT_NO_THROW(parse_trace(good));
  EXPECT_THROW(parse_trace(good + "bogus=1\n"), FormatError);
  EXPECT_THROW(parse_trace(""), FormatError);
  const auto line = good.find("ops=");
  ASSERT_NE(line, std::string::npos);
  std::string bad = good;
  bad.insert(line + 4, "x");
  EXPECT_THROW(parse_trace(bad), FormatError);
  const auto first_key = good.find('\n') + 1;
  const auto first_end = good.find('\n', first_key) + 1;
  EXPECT_THROW(parse_trace(good + good.substr(first_key, first_end - first_key)), FormatError);
  std::string missing = good;
  missing.erase(first_key, first_end - first_key);
  EXPECT_THROW(parse_trace(missing), FormatError);
}
