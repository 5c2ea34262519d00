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

#include "fgmp/clipping.hpp"

#include "fgmp/assignment.hpp"
#include "fgmp/error.hpp"

#include <cmath>

namespace fgmp {

const char *to_string(ClipMode m) noexcept
{
  return m == ClipMode::SensitivityWeighted ? "sw" : "dynmax";
}

std::optional<ClipMode> parse_clip_mode(std::string_view s) noexcept
{
  if (s == "sw")
    return ClipMode::SensitivityWeighted;
  if (s == "dynmax")
    return ClipMode::DynMax;
  return std::nullopt;
}

std::vector<Fp8Code> clip_candidates(BlockView b)
{
  // Positive E4M3 codes 0x01..0x7E increase monotonically in value.
  const Fp8Code top = dynmax_scale(b);
  std::vector<Fp8Code> out;
  out.reserve(top.bits);
  for (unsigned c = kFp8MinPositive.bits; c <= top.bits; ++c)
    out.push_back(Fp8Code{static_cast<std::uint8_t>(c)});
  return out;
}

double clip_objective(BlockView b, std::span<const float, kBlockSize> g2, Fp8Code scale)
{
  const BlockValues recon = quantize_nvfp4(b, scale).dequantize();
  double acc = 0.0;
  for (std::size_t i = 0; i < kBlockSize; ++i)
  {
    const double e = quant_error(b[i], recon[i]);
    acc += static_cast<double>(g2[i]) * (e * e);
  }
  return acc;
}

Fp8Code sw_clip_scale(BlockView b, std::span<const float, kBlockSize> g2)
{
  bool any_weight = false;
  for (float w : g2)
  {
    if (!(w >= 0.0f) || !std::isfinite(w))
      throw Error("sw_clip_scale: g2 must be finite and nonnegative");
    any_weight = any_weight || w > 0.0f;
  }
  const Fp8Code dynmax = dynmax_scale(b);
  if (!any_weight)
    return dynmax;

  Fp8Code best = dynmax;
  double best_obj = clip_objective(b, g2, dynmax);
  // Descending scan; strict improvement keeps ties at the larger scale.
  for (unsigned c = dynmax.bits; c-- > kFp8MinPositive.bits;)
  {
    const Fp8Code s{static_cast<std::uint8_t>(c)};
    const double obj = clip_objective(b, g2, s);
    if (obj < best_obj)
    {
      best_obj = obj;
      best = s;
    }
  }
  return best;
}

Fp8Code select_scale(BlockView b, std::span<const float, kBlockSize> weights, ClipMode mode)
{
  return mode == ClipMode::SensitivityWeighted ? sw_clip_scale(b, weights) : dynmax_scale(b);
}

QuantizedTensor quantize_weights_fgmp(const Tensor &w, const FisherMap &fisher, const Threshold &t,
                                      ClipMode clip)
{
  fisher.check_matches(w);
  return quantize_fgmp(w, ScoreWeights::fisher(fisher), t, clip, fp8_tensor_scale(w.data()));
}

QuantizedTensor quantize_fgmp(const Tensor &t, const ScoreWeights &weights, const Threshold &threshold,
                              ClipMode clip, float fp8_scale)
{
  t.require_blockable();
  weights.check(t);
  QuantizedTensor qt{t.rows(), t.cols(), {}, fp8_scale};
  qt.blocks.reserve(t.block_count());
  for (std::size_t j = 0; j < t.block_count(); ++j)
  {
    BlockEvaluation e = evaluate_block(t, j, weights, clip, fp8_scale);
    if (e.score.value > threshold.value)
      qt.blocks.emplace_back(e.high);
    else
      qt.blocks.emplace_back(e.low);
  }
  return qt;
}

} // namespace fgmp
