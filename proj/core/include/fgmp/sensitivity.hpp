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

#ifndef FGMP_SENSITIVITY_HPP
#define FGMP_SENSITIVITY_HPP

#include "fgmp/blockquant.hpp"
#include "fgmp/tensor.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fgmp {

/// Block importance policy: Fisher-weighted, plain quantization error, or
/// output error weighted by the opposing tensor's channel magnitudes.
enum class Policy
{
  Fisher,
  QuantError,
  OutputError,
};

const char *to_string(Policy p) noexcept;
std::optional<Policy> parse_policy(std::string_view s) noexcept;

enum class FisherKind
{
  PerElement,
  PerChannel,
};

/// Averaged squared gradients. Per-element maps are shaped like the tensor
/// they describe; per-channel maps hold one entry per input channel (column).
class FisherMap
{
public:
  FisherMap() = default;
  /// Per-element map of shape rows x cols.
  FisherMap(std::size_t rows, std::size_t cols, std::vector<float> values);
  /// Per-channel map with one entry per column.
  explicit FisherMap(std::vector<float> channel_values);

  FisherKind kind() const noexcept { return kind_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const float> values() const noexcept { return values_; }

  /// Throws fgmp::Error if this map cannot weight `t` (shape or length mismatch).
  void check_matches(const Tensor &t) const;

private:
  FisherKind kind_ = FisherKind::PerChannel;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

/// Per-input-channel mean of squared magnitudes, avg(Q_i^2).
struct ChannelMagnitudeMap
{
  std::vector<float> values;
};

struct ImpactScore
{
  double value = 0.0;
  Policy policy = Policy::Fisher;
};

using BlockDelta = std::array<float, kBlockSize>;
using BlockWeights = std::array<float, kBlockSize>;

/// Increase in per-element error from storing the block low rather than high
/// precision: (low - v) - (high - v).
BlockDelta error_delta(BlockView b, const NvFp4Block &low, std::span<const float, kBlockSize> high_recon);

/// sum g2_i * delta_i^2. Throws fgmp::Error on negative g2.
ImpactScore impact_fisher(std::span<const float, kBlockSize> g2, const BlockDelta &delta);
/// sum delta_i^2.
ImpactScore impact_qe(const BlockDelta &delta) noexcept;
/// sum q2_i * delta_i^2. Throws fgmp::Error on negative q2.
ImpactScore impact_oe(const BlockDelta &delta, std::span<const float, kBlockSize> q2);

/// Per-channel mean of squares over every row of every sample.
/// Throws fgmp::Error on an empty set or inconsistent column counts.
ChannelMagnitudeMap calibrate_channel_stats(std::span<const Tensor> samples);

/// Element weights a policy applies to one tensor's blocks.
///
/// Non-owning: the referenced FisherMap / ChannelMagnitudeMap must outlive it.
class ScoreWeights
{
public:
  static ScoreWeights fisher(const FisherMap &map) noexcept;
  static ScoreWeights uniform() noexcept;
  static ScoreWeights output_error(const ChannelMagnitudeMap &map) noexcept;

  Policy policy() const noexcept { return policy_; }

  /// Throws fgmp::Error if the weights cannot be applied to `t`.
  void check(const Tensor &t) const;

  /// Weights for block `index` of a tensor with `cols` columns.
  BlockWeights block_weights(std::size_t index, std::size_t cols) const noexcept;

  ImpactScore score(std::size_t index, std::size_t cols, const BlockDelta &delta) const;

private:
  Policy policy_ = Policy::QuantError;
  bool per_element_ = false;
  std::span<const float> values_;
  std::size_t cols_ = 0; // per-element maps: the map's column count
};

} // namespace fgmp

#endif // FGMP_SENSITIVITY_HPP
