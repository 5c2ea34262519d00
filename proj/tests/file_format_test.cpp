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
#include "fgmp/quant_file.hpp"
#include "fgmp/tensor_file.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <random>

using namespace fgmp;

namespace {

using Bytes = std::vector<std::uint8_t>;

void put_u16(Bytes &b, std::uint16_t v)
{
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(Bytes &b, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i)
    b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(Bytes &b, float f)
{
  const auto v = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i)
    b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

Bytes fgt_bytes(std::uint8_t kind, const std::vector<std::uint64_t> &dims, const std::vector<float> &data)
{
  Bytes b{'F', 'G', 'T', '1', 0, kind, static_cast<std::uint8_t>(dims.size()), 0};
  for (auto d : dims)
    put_u64(b, d);
  for (float f : data)
    put_f32(b, f);
  return b;
}

QuantizedTensor random_quantized(std::mt19937_64 &rng, std::size_t rows, std::size_t cols)
{
  const Tensor t = oracle::random_tensor(rng, rows, cols);
  const auto a = oracle::random_assignment(rng, t.block_count(), 0.3);
  return build_quantized(t, a, ScoreWeights::uniform(), ClipMode::DynMax, fp8_tensor_scale(t.data()));
}

std::filesystem::path temp_path(const std::string &name)
{
  return std::filesystem::temp_directory_path() / ("fgmp_file_format_test_" + name);
}

} // namespace

TEST(Fgt, MatchesHandBuiltLayout)
{
  const Tensor t(2, 3, {1.0f, -2.0f, 0.5f, 0.0f, 3.25f, -0.0f});
  const Bytes expect = fgt_bytes(0, {2, 3}, {1.0f, -2.0f, 0.5f, 0.0f, 3.25f, -0.0f});
  EXPECT_EQ(encode_fgt(to_file(t)), expect);
  const TensorFile f = decode_fgt(expect);
  EXPECT_EQ(f.kind, TensorFileKind::Tensor);
  EXPECT_EQ(to_tensor(f, Role::Weight), t);
}

TEST(Fgt, RandomRoundTripIsByteIdentical)
{
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i)
  {
    const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    const std::size_t cols = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    const Tensor t = oracle::random_tensor(rng, rows, cols);
    const Bytes b = encode_fgt(to_file(t));
    EXPECT_EQ(b.size(), 8 + 16 + 4 * rows * cols);
    EXPECT_EQ(encode_fgt(decode_fgt(b)), b);
    EXPECT_EQ(to_tensor(decode_fgt(b), Role::Weight), t);
  }
}

TEST(Fgt, Rejections)
{
  const Bytes good = fgt_bytes(0, {2, 2}, {1, 2, 3, 4});
  EXPECT_NO_THROW(decode_fgt(good));
  auto mutate = [&](std::size_t at, std::uint8_t v) {
    Bytes b = good;
    b[at] = v;
    return b;
  };
  EXPECT_THROW(decode_fgt(mutate(0, 'X')), FormatError); // magic
  EXPECT_THROW(decode_fgt(mutate(4, 1)), FormatError);   // dtype
  EXPECT_THROW(decode_fgt(mutate(5, 9)), FormatError);   // kind
  EXPECT_THROW(decode_fgt(mutate(6, 0)), FormatError);   // ndim
  EXPECT_THROW(decode_fgt(mutate(7, 1)), FormatError);   // pad
  Bytes trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(decode_fgt(trailing), FormatError);
  Bytes truncated = good;
  truncated.pop_back();
  EXPECT_THROW(decode_fgt(truncated), FormatError);
  EXPECT_THROW(decode_fgt(Bytes{'F', 'G'}), FormatError);
  Bytes huge = fgt_bytes(0, {1ull << 62, 8}, {});
  EXPECT_THROW(decode_fgt(huge), FormatError);
}

TEST(Fgt, KindConversions)
{
  const FisherMap per_element(2, 16, std::vector<float>(32, 0.5f));
  const FisherMap per_channel(std::vector<float>(16, 2.0f));
  const ChannelMagnitudeMap mags{std::vector<float>(16, 3.0f)};

  const TensorFile fe = to_file(per_element);
  EXPECT_EQ(fe.kind, TensorFileKind::PerElementFisher);
  EXPECT_EQ(fe.dims, (std::vector<std::uint64_t>{2, 16}));
  const FisherMap back = to_fisher(decode_fgt(encode_fgt(fe)));
  EXPECT_EQ(back.kind(), FisherKind::PerElement);
  EXPECT_EQ(back.rows(), 2u);

  const TensorFile fc = to_file(per_channel);
  EXPECT_EQ(fc.kind, TensorFileKind::PerChannelFisher);
  EXPECT_EQ(to_fisher(fc).kind(), FisherKind::PerChannel);

  const TensorFile fm = to_file(mags);
  EXPECT_EQ(fm.kind, TensorFileKind::ChannelMagnitudes);
  EXPECT_EQ(to_magnitudes(fm).values, mags.values);

  EXPECT_THROW(to_tensor(fe, Role::Weight), FormatError);
  EXPECT_THROW(to_fisher(to_file(Tensor(2, 16))), FormatError);
  EXPECT_THROW(to_magnitudes(fc), FormatError);
  EXPECT_THROW(to_fisher(decode_fgt(fgt_bytes(1, {2, 16}, std::vector<float>(32, -1.0f)))), FormatError);

  const Tensor row = to_tensor(decode_fgt(fgt_bytes(0, {16}, std::vector<float>(16, 1.0f))), Role::Activation);
  EXPECT_EQ(row.rows(), 1u);
  EXPECT_EQ(row.cols(), 16u);
  EXPECT_THROW(to_tensor(decode_fgt(fgt_bytes(0, {1, 2, 2}, {1, 2, 3, 4})), Role::Weight), FormatError);
}

TEST(Fgq, MatchesHandBuiltLayout)
{
  // One NVFP4 block (values 0..7 * 0.5 at scale 1) then one FP8 block.
  Tensor t(1, 32);
  for (std::size_t i = 0; i < 16; ++i)
    t(0, i) = 0.5f * static_cast<float>(i % 8);
  for (std::size_t i = 16; i < 32; ++i)
    t(0, i) = static_cast<float>(i);
  PrecisionAssignment a;
  a.bits = {Precision::NvFp4, Precision::Fp8};
  const auto qt = build_quantized(t, a, ScoreWeights::uniform(), ClipMode::DynMax, 1.0f);

  Bytes expect{'F', 'G', 'Q', '1'};
  put_u16(expect, 16);
  put_u64(expect, 1);
  put_u64(expect, 32);
  put_f32(expect, 1.0f);
  expect.push_back(0b10);
  const auto &low = std::get<NvFp4Block>(qt.blocks[0]);
  for (std::size_t i = 0; i < 16; i += 2)
    expect.push_back(static_cast<std::uint8_t>(low.codes[i].bits | (low.codes[i + 1].bits << 4)));
  expect.push_back(low.scale.bits);
  for (std::size_t i = 16; i < 32; ++i)
    expect.push_back(oracle::fp8_encode(static_cast<float>(i)).bits);

  ASSERT_EQ(expect.size(), kFgqHeaderBytes + 1 + 9 + 16);
  EXPECT_EQ(encode_fgq(qt), expect);
  EXPECT_EQ(decode_fgq(expect), qt);
}

TEST(Fgq, RandomRoundTripIsByteIdentical)
{
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i)
  {
    const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
    const std::size_t cols = 16 * std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const auto qt = random_quantized(rng, rows, cols);
    const Bytes b = encode_fgq(qt);
    const std::size_t n4 = qt.count(Precision::NvFp4), n8 = qt.count(Precision::Fp8);
    EXPECT_EQ(b.size(), kFgqHeaderBytes + (qt.block_count() + 7) / 8 + 9 * n4 + 16 * n8);
    const auto back = decode_fgq(b);
    EXPECT_EQ(back, qt);
    EXPECT_EQ(encode_fgq(back), b);
    EXPECT_EQ(dequantize(back), dequantize(qt));
  }
}

TEST(Fgq, Rejections)
{
  std::mt19937_64 rng(3);
  // 3 blocks: bitmap has 5 padding bits.
  Tensor t = oracle::random_tensor(rng, 1, 48);
  PrecisionAssignment a;
  a.bits = {Precision::NvFp4, Precision::Fp8, Precision::NvFp4};
  const auto qt = build_quantized(t, a, ScoreWeights::uniform(), ClipMode::DynMax, fp8_tensor_scale(t.data()));
  const Bytes good = encode_fgq(qt);
  ASSERT_NO_THROW(decode_fgq(good));
  auto mutate = [&](std::size_t at, std::uint8_t v) {
    Bytes b = good;
    b[at] = v;
    return b;
  };
  EXPECT_THROW(decode_fgq(mutate(0, 'X')), FormatError);
  EXPECT_THROW(decode_fgq(mutate(4, 32)), FormatError);              // block size
  EXPECT_THROW(decode_fgq(mutate(14, 17)), FormatError);             // cols not a multiple of 16
  EXPECT_THROW(decode_fgq(mutate(kFgqHeaderBytes, 0b1010)), FormatError); // padding bit set
  EXPECT_THROW(decode_fgq(mutate(kFgqHeaderBytes + 1 + 8, 0x00)), FormatError); // zero NVFP4 scale
  EXPECT_THROW(decode_fgq(mutate(kFgqHeaderBytes + 1 + 8, 0x7F)), FormatError); // NaN NVFP4 scale
  Bytes bad_scale = good;
  const float neg = -1.0f;
  std::memcpy(bad_scale.data() + 22, &neg, 4);
  EXPECT_THROW(decode_fgq(bad_scale), FormatError);
  Bytes trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(decode_fgq(trailing), FormatError);
  Bytes truncated = good;
  truncated.pop_back();
  EXPECT_THROW(decode_fgq(truncated), FormatError);
  // A bitmap claiming FP8 for block 0 changes the expected length.
  EXPECT_THROW(decode_fgq(mutate(kFgqHeaderBytes, 0b011)), FormatError);
}

TEST(Files, ReadWriteRoundTrip)
{
  std::mt19937_64 rng(4);
  const Tensor t = oracle::random_tensor(rng, 3, 32);
  const auto p = temp_path("t.fgt");
  write_fgt(p, to_file(t));
  EXPECT_EQ(to_tensor(read_fgt(p), Role::Weight), t);
  const auto qt = random_quantized(rng, 3, 32);
  const auto q = temp_path("q.fgq");
  write_fgq(q, qt);
  EXPECT_EQ(read_fgq(q), qt);
  std::filesystem::remove(p);
  std::filesystem::remove(q);
  EXPECT_THROW(read_fgt(temp_path("missing.fgt")), Error);
  write_bytes(p, Bytes{'n', 'o', 'p', 'e'});
  EXPECT_THROW(read_fgt(p), FormatError);
  std::filesystem::remove(p);
}
