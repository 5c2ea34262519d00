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

#ifndef FGMP_BLOCKQUANT_HPP
#define FGMP_BLOCKQUANT_HPP

#include "fgmp/numerics.hpp"
#include "fgmp/tensor.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace fgmp {

/// Per-block precision, stored as the block's single metadata bit.
enum class Precision : std::uint8_t
{
  NvFp4 = 0,
  Fp8 = 1,
};

const char *to_string(Precision p) noexcept;

using BlockView = std::span<const float, kBlockSize>;
using BlockValues = std::array<float, kBlockSize>;

/// FP4 element codes sharing one E4M3 microscale.
struct NvFp4Block
{
  std::array<Fp4Code, kBlockSize> codes{};
  Fp8Code scale = kFp8One;

  BlockValues dequantize() const noexcept;
  friend bool operator==(const NvFp4Block &, const NvFp4Block &) = default;
};

/// FP8 element codes; the scale lives on the owning tensor.
struct Fp8Block
{
  std::array<Fp8Code, kBlockSize> codes{};

  BlockValues dequantize(float tensor_scale) const noexcept;
  friend bool operator==(const Fp8Block &, const Fp8Block &) = default;
};

using QuantizedBlock = std::variant<NvFp4Block, Fp8Block>;

inline Precision precision_of(const QuantizedBlock &b) noexcept
{
  return std::holds_alternative<Fp8Block>(b) ? Precision::Fp8 : Precision::NvFp4;
}

/// Row-major sequence of tagged blocks. Block j of row r sits at index
/// r * (cols / 16) + j and covers columns [16 j, 16 j + 16).
struct QuantizedTensor
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<QuantizedBlock> blocks;
  float fp8_tensor_scale = 1.0f;

  std::size_t blocks_per_row() const noexcept { return cols / kBlockSize; }
  std::size_t block_count() const noexcept { return blocks.size(); }
  std::vector<Precision> meta() const;
  std::size_t count(Precision p) const noexcept;

  /// Dequantized values of one block.
  BlockValues block_values(std::size_t index) const;

  /// Throws fgmp::Error if shape, block count or scales are inconsistent.
  void validate() const;

  friend bool operator==(const QuantizedTensor &, const QuantizedTensor &) = default;
};

float block_amax(BlockView b) noexcept;

/// encode_fp8(amax / 6); 1.0 for an all-zero block. Never returns a zero scale:
/// an amax too small for the E4M3 subnormal range maps to the smallest positive code.
Fp8Code dynmax_scale(BlockView b);

/// Throws fgmp::Error if the scale does not decode to a positive finite value.
NvFp4Block quantize_nvfp4(BlockView b, Fp8Code scale);

/// Per-tensor FP8 scale: amax / 448, or 1.0 when amax is zero.
float fp8_tensor_scale(std::span<const float> values);

Fp8Block quantize_fp8_block(BlockView b, float tensor_scale);

struct Fp8TensorCodes
{
  std::vector<Fp8Code> codes;
  float tensor_scale = 1.0f;
};

/// Plain FP8 quantization of a whole tensor with a single scale.
Fp8TensorCodes quantize_fp8_tensor(const Tensor &t);

/// Quantization error of one element: reconstructed - v.
constexpr float quant_error(float v, float reconstructed) noexcept { return reconstructed - v; }

/// Quantize every block of `t` in NVFP4 using dynamic-max scales.
QuantizedTensor quantize_all_nvfp4(const Tensor &t);
/// Quantize every block of `t` in FP8 using its per-tensor scale.
QuantizedTensor quantize_all_fp8(const Tensor &t);

Tensor dequantize(const QuantizedTensor &qt);

} // namespace fgmp

#endif // FGMP_BLOCKQUANT_HPP
