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

#ifndef FGMP_TENSOR_HPP
#define FGMP_TENSOR_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fgmp {

/// Number of elements per quantization block along the reduction dimension.
inline constexpr std::size_t kBlockSize = 16;

enum class Role
{
  Weight,
  Activation,
};

const char *to_string(Role role) noexcept;

/// Dense row-major 2-D array of binary32 values.
///
/// Blocks always run along the columns: column index is the dot-product
/// (input-channel) dimension. Weights are [out_channels x in_channels];
/// activations are stored token-major as [tokens x channels].
class Tensor
{
public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, Role role = Role::Weight, std::string layer = {});
  Tensor(std::size_t rows, std::size_t cols, std::vector<float> data, Role role = Role::Weight,
         std::string layer = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  Role role() const noexcept { return role_; }
  const std::string &layer() const noexcept { return layer_; }
  void set_role(Role role) noexcept { role_ = role; }
  void set_layer(std::string layer) { layer_ = std::move(layer); }

  float &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::size_t blocks_per_row() const noexcept { return cols_ / kBlockSize; }
  std::size_t block_count() const noexcept { return rows_ * blocks_per_row(); }

  /// Block `index` in row-major block order (row = index / blocks_per_row()).
  std::span<const float, kBlockSize> block(std::size_t index) const noexcept
  {
    return std::span<const float, kBlockSize>(data_.data() + index * kBlockSize, kBlockSize);
  }

  /// Throws fgmp::Error unless cols is a nonzero multiple of kBlockSize.
  void require_blockable() const;
  /// Throws fgmp::Error on NaN or infinity.
  void require_finite() const;

  friend bool operator==(const Tensor &, const Tensor &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
  Role role_ = Role::Weight;
  std::string layer_;
};

} // namespace fgmp

#endif // FGMP_TENSOR_HPP
