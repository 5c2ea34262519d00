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

#include "fgmp/quant_file.hpp"

#include "byte_io.hpp"
#include "fgmp/tensor_file.hpp"

#include <algorithm>
#include <cmath>

namespace fgmp {

namespace {

constexpr std::string_view kMagic = "FGQ1";
constexpr std::size_t kNvFp4PayloadBytes = kBlockSize / 2 + 1;
constexpr std::size_t kFp8PayloadBytes = kBlockSize;

} // namespace

std::vector<std::uint8_t> encode_fgq(const QuantizedTensor &qt)
{
  qt.validate();
  const std::size_t nblocks = qt.block_count();
  detail::ByteWriter w;
  w.reserve(kFgqHeaderBytes + (nblocks + 7) / 8 + nblocks * kFp8PayloadBytes);
  w.bytes(kMagic);
  w.u16(static_cast<std::uint16_t>(kBlockSize));
  w.u64(qt.rows);
  w.u64(qt.cols);
  w.f32(qt.fp8_tensor_scale);

  std::vector<std::uint8_t> bitmap((nblocks + 7) / 8, 0);
  for (std::size_t i = 0; i < nblocks; ++i)
    if (precision_of(qt.blocks[i]) == Precision::Fp8)
      bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  for (auto b : bitmap)
    w.u8(b);

  for (const auto &blk : qt.blocks)
  {
    if (const auto *fp4 = std::get_if<NvFp4Block>(&blk))
    {
      for (std::size_t i = 0; i < kBlockSize; i += 2)
        w.u8(static_cast<std::uint8_t>((fp4->codes[i].bits & 0xF) | ((fp4->codes[i + 1].bits & 0xF) << 4)));
      w.u8(fp4->scale.bits);
    }
    else
    {
      for (const auto c : std::get<Fp8Block>(blk).codes)
        w.u8(c.bits);
    }
  }
  return w.take();
}

QuantizedTensor decode_fgq(std::span<const std::uint8_t> bytes)
{
  detail::ByteReader r(bytes, "fgq");
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin()))
    throw FormatError("fgq: bad magic (expected FGQ1)");
  if (const auto bs = r.u16(); bs != kBlockSize)
    throw FormatError("fgq: unsupported block size " + std::to_string(bs));

  QuantizedTensor qt;
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  qt.fp8_tensor_scale = r.f32();
  if (rows == 0 || cols == 0 || cols % kBlockSize != 0)
    throw FormatError("fgq: invalid shape " + std::to_string(rows) + "x" + std::to_string(cols));
  if (!(qt.fp8_tensor_scale > 0.0f) || !std::isfinite(qt.fp8_tensor_scale))
    throw FormatError("fgq: FP8 tensor scale must be positive and finite");
  const std::uint64_t nblocks = detail::checked_mul(rows, cols / kBlockSize, "fgq");
  // Every block takes at least 9 payload bytes; bound before allocating.
  if (nblocks > r.remaining() / kNvFp4PayloadBytes)
    throw FormatError("fgq: truncated (" + std::to_string(nblocks) + " blocks declared)");
  qt.rows = rows;
  qt.cols = cols;

  const auto bitmap = r.take((nblocks + 7) / 8);
  if (nblocks % 8 != 0 && (bitmap.back() >> (nblocks % 8)) != 0)
    throw FormatError("fgq: nonzero padding bits in metadata bitmap");

  qt.blocks.reserve(nblocks);
  for (std::uint64_t i = 0; i < nblocks; ++i)
  {
    const bool fp8 = (bitmap[i / 8] >> (i % 8)) & 1u;
    if (fp8)
    {
      const auto p = r.take(kFp8PayloadBytes);
      Fp8Block b;
      for (std::size_t j = 0; j < kBlockSize; ++j)
        b.codes[j] = Fp8Code{p[j]};
      qt.blocks.emplace_back(b);
    }
    else
    {
      const auto p = r.take(kNvFp4PayloadBytes);
      NvFp4Block b;
      for (std::size_t j = 0; j < kBlockSize / 2; ++j)
      {
        b.codes[2 * j] = Fp4Code{static_cast<std::uint8_t>(p[j] & 0xF)};
        b.codes[2 * j + 1] = Fp4Code{static_cast<std::uint8_t>(p[j] >> 4)};
      }
      b.scale = Fp8Code{p[kBlockSize / 2]};
      if (!(decode_fp8(b.scale) > 0.0f))
        throw FormatError("fgq: block " + std::to_string(i) + " has a non-positive or NaN scale code");
      qt.blocks.emplace_back(b);
    }
  }
  r.expect_end();
  return qt;
}

QuantizedTensor read_fgq(const std::filesystem::path &path)
{
  try
  {
    return decode_fgq(read_bytes(path));
  }
  catch (const FormatError &e)
  {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_fgq(const std::filesystem::path &path, const QuantizedTensor &qt)
{
  write_bytes(path, encode_fgq(qt));
}

} // namespace fgmp
