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

#include "fgmp/blockquant.hpp"

#include "fgmp/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fgmp {

const char *to_string(Precision p) noexcept
{
  return p == Precision::Fp8 ? "fp8" : "nvfp4";
}

BlockValues NvFp4Block::dequantize() const noexcept
{
  const float s = decode_fp8(scale);
  BlockValues out;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    out[i] = decode_fp4(codes[i]) * s;
  return out;
}

BlockValues Fp8Block::dequantize(float tensor_scale) const noexcept
{
  BlockValues out;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    out[i] = decode_fp8(codes[i]) * tensor_scale;
  return out;
}

std::vector<Precision> QuantizedTensor::meta() const
{
  std::vector<Precision> bits;
  bits.reserve(blocks.size());
  for (const auto &b : blocks)
    bits.push_back(precision_of(b));
  return bits;
}

std::size_t QuantizedTensor::count(Precision p) const noexcept
{
  return static_cast<std::size_t>(
    std::count_if(blocks.begin(), blocks.end(), [p](const auto &b) { return precision_of(b) == p; }));
}

BlockValues QuantizedTensor::block_values(std::size_t index) const
{
  const auto &b = blocks.at(index);
  if (const auto *fp4 = std::get_if<NvFp4Block>(&b))
    return fp4->dequantize();
  return std::get<Fp8Block>(b).dequantize(fp8_tensor_scale);
}

void QuantizedTensor::validate() const
{
  if (rows == 0 || cols == 0 || cols % kBlockSize != 0)
    throw Error("QuantizedTensor: invalid shape " + std::to_string(rows) + "x" + std::to_string(cols));
  if (blocks.size() != rows * blocks_per_row())
    throw Error("QuantizedTensor: block count " + std::to_string(blocks.size()) +
                " does not match shape");
  if (!(fp8_tensor_scale > 0.0f) || !std::isfinite(fp8_tensor_scale))
    throw Error("QuantizedTensor: FP8 tensor scale must be positive and finite");
  for (const auto &b : blocks)
    if (const auto *fp4 = std::get_if<NvFp4Block>(&b))
    {
      const float s = decode_fp8(fp4->scale);
      if (!(s > 0.0f))
        throw Error("QuantizedTensor: NVFP4 block with non-positive or NaN scale");
    }
}

float block_amax(BlockView b) noexcept
{
  float m = 0.0f;
  for (float v : b)
    m = std::max(m, std::fabs(v));
  return m;
}

Fp8Code dynmax_scale(BlockView b)
{
  const float amax = block_amax(b);
  if (amax == 0.0f)
    return kFp8One;
  const Fp8Code code = encode_fp8(amax / kFp4Max);
  return code.bits == 0 ? kFp8MinPositive : code;
}

NvFp4Block quantize_nvfp4(BlockView b, Fp8Code scale)
{
  const float s = decode_fp8(scale);
  if (!(s > 0.0f))
    throw Error("quantize_nvfp4: scale must decode to a positive value");
  NvFp4Block out;
  out.scale = scale;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    out.codes[i] = encode_fp4(b[i] / s);
  return out;
}

float fp8_tensor_scale(std::span<const float> values)
{
  float amax = 0.0f;
  for (float v : values)
  {
    if (!std::isfinite(v))
      throw Error("fp8_tensor_scale: non-finite element");
    amax = std::max(amax, std::fabs(v));
  }
  const float scale = amax / kFp8Max;
  // amax below ~448 * denorm_min underflows; treat it like an all-zero tensor.
  return scale > 0.0f ? scale : 1.0f;
}

Fp8Block quantize_fp8_block(BlockView b, float tensor_scale)
{
  if (!(tensor_scale > 0.0f) || !std::isfinite(tensor_scale))
    throw Error("quantize_fp8_block: tensor scale must be positive and finite");
  Fp8Block out;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    out.codes[i] = encode_fp8(b[i] / tensor_scale);
  return out;
}

Fp8TensorCodes quantize_fp8_tensor(const Tensor &t)
{
  Fp8TensorCodes out;
  out.tensor_scale = fp8_tensor_scale(t.data());
  out.codes.reserve(t.size());
  for (float v : t.data())
    out.codes.push_back(encode_fp8(v / out.tensor_scale));
  return out;
}

QuantizedTensor quantize_all_nvfp4(const Tensor &t)
{
  t.require_blockable();
  QuantizedTensor qt{t.rows(), t.cols(), {}, fp8_tensor_scale(t.data())};
  qt.blocks.reserve(t.block_count());
  for (std::size_t j = 0; j < t.block_count(); ++j)
  {
    const auto b = t.block(j);
    qt.blocks.emplace_back(quantize_nvfp4(b, dynmax_scale(b)));
  }
  return qt;
}

QuantizedTensor quantize_all_fp8(const Tensor &t)
{
  t.require_blockable();
  QuantizedTensor qt{t.rows(), t.cols(), {}, fp8_tensor_scale(t.data())};
  qt.blocks.reserve(t.block_count());
  for (std::size_t j = 0; j < t.block_count(); ++j)
    qt.blocks.emplace_back(quantize_fp8_block(t.block(j), qt.fp8_tensor_scale));
  return qt;
}

Tensor dequantize(const QuantizedTensor &qt)
{
  qt.validate();
  Tensor out(qt.rows, qt.cols);
  auto data = out.data();
  for (std::size_t j = 0; j < qt.blocks.size(); ++j)
  {
    const BlockValues v = qt.block_values(j);
    std::copy(v.begin(), v.end(), data.begin() + static_cast<std::ptrdiff_t>(j * kBlockSize));
  }
  return out;
}

} // namespace fgmp
