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

#include "fgmp/tensor.hpp"

#include "fgmp/error.hpp"

#include <cmath>

namespace fgmp {

const char *to_string(Role role) noexcept
{
  return role == Role::Weight ? "weight" : "activation";
}

Tensor::Tensor(std::size_t rows, std::size_t cols, Role role, std::string layer)
  : rows_(rows), cols_(cols), data_(rows * cols, 0.0f), role_(role), layer_(std::move(layer))
{
}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<float> data, Role role,
               std::string layer)
  : rows_(rows), cols_(cols), data_(std::move(data)), role_(role), layer_(std::move(layer))
{
  if (data_.size() != rows_ * cols_)
    throw Error("Tensor: data size " + std::to_string(data_.size()) + " does not match shape " +
                std::to_string(rows_) + "x" + std::to_string(cols_));
}

void Tensor::require_blockable() const
{
  if (cols_ == 0 || cols_ % kBlockSize != 0)
    throw Error("tensor '" + layer_ + "': column count " + std::to_string(cols_) +
                " is not a positive multiple of " + std::to_string(kBlockSize));
}

void Tensor::require_finite() const
{
  for (float v : data_)
    if (!std::isfinite(v))
      throw Error("tensor '" + layer_ + "': contains non-finite values");
}

} // namespace fgmp
