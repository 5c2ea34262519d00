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

#ifndef FGMP_PRECISION_HPP
#define FGMP_PRECISION_HPP

#include "fgmp/blockquant.hpp"
#include "fgmp/tensor.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace fgmp {

enum class Scope
{
  Local,
  Global,
};

const char *to_string(Scope s) noexcept;
std::optional<Scope> parse_scope(std::string_view s) noexcept;

/// Impact-score threshold above which a block is kept in FP8.
struct Threshold
{
  double value = std::numeric_limits<double>::infinity();
  Scope scope = Scope::Global;
  Role domain = Role::Weight;
  double ratio = 1.0;

  friend bool operator==(const Threshold &, const Threshold &) = default;
};

/// One precision bit per block, in the owning tensor's block order.
struct PrecisionAssignment
{
  std::vector<Precision> bits;
  Threshold threshold;

  std::size_t count(Precision p) const noexcept;
  double fp4_fraction() const noexcept;

  friend bool operator==(const PrecisionAssignment &, const PrecisionAssignment &) = default;
};

} // namespace fgmp

#endif // FGMP_PRECISION_HPP
