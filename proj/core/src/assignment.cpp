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
#include "fgmp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fgmp {

const char *to_string(Scope s) noexcept
{
  return s == Scope::Local ? "local" : "global";
}

std::optional<Scope> parse_scope(std::string_view s) noexcept
{
  if (s == "local")
    return Scope::Local;
  if (s == "global")
    return Scope::Global;
  return std::nullopt;
}

std::size_t PrecisionAssignment::count(Precision p) const noexcept
{
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), p));
}

double PrecisionAssignment::fp4_fraction() const noexcept
{
  if (bits.empty())
    return 1.0;
  return static_cast<double>(count(Precision::NvFp4)) / static_cast<double>(bits.size());
}

double percentile_nearest_rank(std::span<const double> scores, double ratio)
{
  if (scores.empty())
    throw Error("percentile: empty score set");
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw Error("percentile: ratio must lie in [0, 1]");

  const std::size_t n = scores.size();
  // ratio * n is snapped to the nearest integer when it is one up to rounding
  // noise, so e.g. 0.7 * 10 gives rank 7, not 8.
  const double exact = ratio * static_cast<double>(n);
  const double nearest = std::round(exact);
  const double rank = std::fabs(exact - nearest) <= 1e-9 * static_cast<double>(n) ? nearest
                                                                                 : std::ceil(exact);
  std::size_t index = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  index = std::min(index, n - 1);

  std::vector<double> sorted(scores.begin(), scores.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(index), sorted.end());
  return sorted[index];
}

BlockEvaluation evaluate_block(const Tensor &t, std::size_t index, const ScoreWeights &weights,
                               ClipMode clip, float fp8_scale)
{
  const BlockView b = t.block(index);
  const BlockWeights w = weights.block_weights(index, t.cols());
  BlockEvaluation e;
  e.low = quantize_nvfp4(b, select_scale(b, w, clip));
  e.high = quantize_fp8_block(b, fp8_scale);
  const BlockValues high_recon = e.high.dequantize(fp8_scale);
  e.delta = error_delta(b, e.low, high_recon);
  e.score = weights.score(index, t.cols(), e.delta);
  return e;
}

std::vector<double> score_blocks(const Tensor &t, const ScoreWeights &weights, ClipMode clip,
                                 float fp8_scale, unsigned threads)
{
  t.require_blockable();
  weights.check(t);
  std::vector<double> scores(t.block_count());
  parallel_for(scores.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j)
      scores[j] = evaluate_block(t, j, weights, clip, fp8_scale).score.value;
  });
  return scores;
}

const Threshold &Calibration::for_layer(std::size_t layer) const
{
  if (thresholds.empty())
    throw Error("calibration holds no thresholds");
  if (thresholds.size() == 1)
    return thresholds.front();
  return thresholds.at(layer);
}

Calibration calibrate_from_pools(std::vector<std::vector<double>> pools, double ratio, Scope scope,
                                 Role domain)
{
  if (pools.empty())
    throw Error("calibrate: no layers");
  Calibration cal;
  if (scope == Scope::Global)
  {
    std::vector<double> all;
    for (const auto &p : pools)
      all.insert(all.end(), p.begin(), p.end());
    cal.thresholds.push_back({percentile_nearest_rank(all, ratio), scope, domain, ratio});
  }
  else
  {
    for (const auto &p : pools)
      cal.thresholds.push_back({percentile_nearest_rank(p, ratio), scope, domain, ratio});
  }
  cal.pools = std::move(pools);
  return cal;
}

Calibration calibrate_threshold(std::span<const LayerScoring> layers, const CalibrationOptions &options)
{
  if (layers.empty())
    throw Error("calibrate: no layers");
  const ClipMode clip = options.domain == Role::Activation ? ClipMode::DynMax : options.clip;
  std::vector<std::vector<double>> pools;
  pools.reserve(layers.size());
  for (const LayerScoring &layer : layers)
  {
    if (layer.tensor == nullptr)
      throw Error("calibrate: null tensor");
    const float scale = layer.fp8_scale.value_or(fp8_tensor_scale(layer.tensor->data()));
    pools.push_back(score_blocks(*layer.tensor, layer.weights, clip, scale, options.threads));
  }
  return calibrate_from_pools(std::move(pools), options.ratio, options.scope, options.domain);
}

PrecisionAssignment assign_precision(std::span<const double> scores, const Threshold &t)
{
  PrecisionAssignment a;
  a.threshold = t;
  a.bits.reserve(scores.size());
  for (double s : scores)
    a.bits.push_back(s > t.value ? Precision::Fp8 : Precision::NvFp4);
  return a;
}

PrecisionAssignment assign_precision(std::span<const ImpactScore> scores, const Threshold &t)
{
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto &s : scores)
    values.push_back(s.value);
  return assign_precision(values, t);
}

QuantizedTensor build_quantized(const Tensor &t, const PrecisionAssignment &assignment,
                                const ScoreWeights &weights, ClipMode clip, float fp8_scale)
{
  t.require_blockable();
  weights.check(t);
  if (assignment.bits.size() != t.block_count())
    throw Error("build_quantized: assignment length does not match block count");
  QuantizedTensor qt{t.rows(), t.cols(), {}, fp8_scale};
  qt.blocks.reserve(t.block_count());
  for (std::size_t j = 0; j < t.block_count(); ++j)
  {
    const BlockView b = t.block(j);
    if (assignment.bits[j] == Precision::Fp8)
      qt.blocks.emplace_back(quantize_fp8_block(b, fp8_scale));
    else
      qt.blocks.emplace_back(quantize_nvfp4(b, select_scale(b, weights.block_weights(j, t.cols()), clip)));
  }
  return qt;
}

OnlineQuantization assign_online(const Tensor &act, const FisherMap &g2_channels, const Threshold &t,
                                 float fp8_scale)
{
  if (g2_channels.kind() != FisherKind::PerChannel)
    throw Error("assign_online: activation Fisher must be per-channel");
  if (g2_channels.cols() != act.cols())
    throw Error("assign_online: missing channel statistics (" + std::to_string(g2_channels.cols()) +
                " channels for " + std::to_string(act.cols()) + " activation channels)");
  act.require_blockable();
  if (!(fp8_scale > 0.0f) || !std::isfinite(fp8_scale))
    throw Error("assign_online: FP8 scale must be positive and finite");

  const auto g2 = g2_channels.values();
  const std::size_t per_row = act.blocks_per_row();
  OnlineQuantization out;
  out.tensor = QuantizedTensor{act.rows(), act.cols(), {}, fp8_scale};
  out.tensor.blocks.reserve(act.block_count());
  out.assignment.threshold = t;
  out.assignment.bits.reserve(act.block_count());
  for (std::size_t j = 0; j < act.block_count(); ++j)
  {
    const BlockView b = act.block(j);
    const std::span<const float, kBlockSize> channel_g2(g2.data() + (j % per_row) * kBlockSize,
                                                        kBlockSize);
    const NvFp4Block low = quantize_nvfp4(b, dynmax_scale(b));
    const Fp8Block high = quantize_fp8_block(b, fp8_scale);
    const BlockValues high_recon = high.dequantize(fp8_scale);
    const double score = impact_fisher(channel_g2, error_delta(b, low, high_recon)).value;
    if (score > t.value)
    {
      out.tensor.blocks.emplace_back(high);
      out.assignment.bits.push_back(Precision::Fp8);
    }
    else
    {
      out.tensor.blocks.emplace_back(low);
      out.assignment.bits.push_back(Precision::NvFp4);
    }
  }
  return out;
}

} // namespace fgmp
