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

#include "fgmp/sensitivity.hpp"

#include "fgmp/error.hpp"

#include <cmath>
#include <string>

namespace fgmp {

namespace {

void require_nonnegative(std::span<const float> values, const char *what)
{
  for (float v : values)
    if (!(v >= 0.0f) || !std::isfinite(v))
      throw Error(std::string(what) + ": weights must be finite and nonnegative");
}

// Fixed 0..15 order, binary32 inputs promoted to binary64.
double weighted_square_sum(std::span<const float, kBlockSize> w, const BlockDelta &delta) noexcept
{
  double acc = 0.0;
  for (std::size_t i = 0; i < kBlockSize; ++i)
  {
    const double d = delta[i];
    acc += static_cast<double>(w[i]) * (d * d);
  }
  return acc;
}

constexpr BlockWeights kOnes = [] {
  BlockWeights w{};
  for (auto &x : w)
    x = 1.0f;
  return w;
}();

} // namespace

const char *to_string(Policy p) noexcept
{
  switch (p)
  {
    case Policy::Fisher:
      return "fisher";
    case Policy::QuantError:
      return "qe";
    case Policy::OutputError:
      return "oe";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view s) noexcept
{
  if (s == "fisher")
    return Policy::Fisher;
  if (s == "qe")
    return Policy::QuantError;
  if (s == "oe")
    return Policy::OutputError;
  return std::nullopt;
}

FisherMap::FisherMap(std::size_t rows, std::size_t cols, std::vector<float> values)
  : kind_(FisherKind::PerElement), rows_(rows), cols_(cols), values_(std::move(values))
{
  if (values_.size() != rows_ * cols_)
    throw Error("FisherMap: value count does not match shape");
  require_nonnegative(values_, "FisherMap");
}

FisherMap::FisherMap(std::vector<float> channel_values)
  : kind_(FisherKind::PerChannel), rows_(1), cols_(channel_values.size()),
    values_(std::move(channel_values))
{
  require_nonnegative(values_, "FisherMap");
}

void FisherMap::check_matches(const Tensor &t) const
{
  if (kind_ == FisherKind::PerElement && (rows_ != t.rows() || cols_ != t.cols()))
    throw Error("FisherMap: per-element shape " + std::to_string(rows_) + "x" +
                std::to_string(cols_) + " does not match tensor " + std::to_string(t.rows()) +
                "x" + std::to_string(t.cols()));
  if (kind_ == FisherKind::PerChannel && cols_ != t.cols())
    throw Error("FisherMap: " + std::to_string(cols_) + " channels for a tensor with " +
                std::to_string(t.cols()) + " columns");
}

BlockDelta error_delta(BlockView b, const NvFp4Block &low, std::span<const float, kBlockSize> high_recon)
{
  const BlockValues low_recon = low.dequantize();
  BlockDelta d;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    d[i] = quant_error(b[i], low_recon[i]) - quant_error(b[i], high_recon[i]);
  return d;
}

ImpactScore impact_fisher(std::span<const float, kBlockSize> g2, const BlockDelta &delta)
{
  require_nonnegative(g2, "impact_fisher");
  return {weighted_square_sum(g2, delta), Policy::Fisher};
}

ImpactScore impact_qe(const BlockDelta &delta) noexcept
{
  return {weighted_square_sum(kOnes, delta), Policy::QuantError};
}

ImpactScore impact_oe(const BlockDelta &delta, std::span<const float, kBlockSize> q2)
{
  require_nonnegative(q2, "impact_oe");
  return {weighted_square_sum(q2, delta), Policy::OutputError};
}

ChannelMagnitudeMap calibrate_channel_stats(std::span<const Tensor> samples)
{
  if (samples.empty())
    throw Error("calibrate_channel_stats: empty sample set");
  const std::size_t cols = samples.front().cols();
  std::vector<double> sums(cols, 0.0);
  std::size_t rows = 0;
  for (const Tensor &t : samples)
  {
    if (t.cols() != cols)
      throw Error("calibrate_channel_stats: inconsistent channel counts across samples");
    for (std::size_t r = 0; r < t.rows(); ++r)
      for (std::size_t c = 0; c < cols; ++c)
      {
        const double v = t(r, c);
        sums[c] += v * v;
      }
    rows += t.rows();
  }
  ChannelMagnitudeMap out;
  out.values.resize(cols, 0.0f);
  if (rows > 0)
    for (std::size_t c = 0; c < cols; ++c)
      out.values[c] = static_cast<float>(sums[c] / static_cast<double>(rows));
  return out;
}

ScoreWeights ScoreWeights::fisher(const FisherMap &map) noexcept
{
  ScoreWeights w;
  w.policy_ = Policy::Fisher;
  w.per_element_ = map.kind() == FisherKind::PerElement;
  w.values_ = map.values();
  w.cols_ = map.cols();
  return w;
}

ScoreWeights ScoreWeights::uniform() noexcept
{
  return ScoreWeights{};
}

ScoreWeights ScoreWeights::output_error(const ChannelMagnitudeMap &map) noexcept
{
  ScoreWeights w;
  w.policy_ = Policy::OutputError;
  w.values_ = map.values;
  return w;
}

void ScoreWeights::check(const Tensor &t) const
{
  if (policy_ == Policy::QuantError)
    return;
  const std::size_t expected = per_element_ ? t.size() : t.cols();
  if (values_.size() != expected || (per_element_ && cols_ != t.cols()))
    throw Error(std::string("score weights (") + to_string(policy_) + "): expected " +
                std::to_string(expected) + " values for tensor '" + t.layer() + "', got " +
                std::to_string(values_.size()));
}

BlockWeights ScoreWeights::block_weights(std::size_t index, std::size_t cols) const noexcept
{
  if (policy_ == Policy::QuantError)
    return kOnes;
  BlockWeights w;
  const std::size_t offset =
    per_element_ ? index * kBlockSize : (index % (cols / kBlockSize)) * kBlockSize;
  for (std::size_t i = 0; i < kBlockSize; ++i)
    w[i] = values_[offset + i];
  return w;
}

ImpactScore ScoreWeights::score(std::size_t index, std::size_t cols, const BlockDelta &delta) const
{
  switch (policy_)
  {
    case Policy::Fisher:
      return impact_fisher(block_weights(index, cols), delta);
    case Policy::OutputError:
      return impact_oe(delta, block_weights(index, cols));
    case Policy::QuantError:
      break;
  }
  return impact_qe(delta);
}

} // namespace fgmp
