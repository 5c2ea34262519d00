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

#ifndef FGMP_CLIPPING_HPP
#define FGMP_CLIPPING_HPP

#include "fgmp/blockquant.hpp"
#include "fgmp/precision.hpp"
#include "fgmp/sensitivity.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fgmp {

/// How NVFP4 block scales are chosen: amax/6, or a sensitivity-weighted
/// search over E4M3 scale values.
enum class ClipMode
{
  DynMax,
  SensitivityWeighted,
};

const char *to_string(ClipMode m) noexcept;
std::optional<ClipMode> parse_clip_mode(std::string_view s) noexcept;

/// Every positive finite E4M3 code whose value does not exceed the block's
/// dynamic-max scale, in ascending order (the dynmax code is always last).
std::vector<Fp8Code> clip_candidates(BlockView b);

/// sum g2_i * (Q_s(v_i) - v_i)^2, accumulated in binary64 in index order.
double clip_objective(BlockView b, std::span<const float, kBlockSize> g2, Fp8Code scale);

/// Scale minimizing clip_objective over clip_candidates(b); ties go to the
/// larger scale. Returns dynmax_scale(b) when g2 is identically zero.
/// Throws fgmp::Error on negative or non-finite g2.
Fp8Code sw_clip_scale(BlockView b, std::span<const float, kBlockSize> g2);

/// dynmax_scale(b) or sw_clip_scale(b, weights), per `mode`.
Fp8Code select_scale(BlockView b, std::span<const float, kBlockSize> weights, ClipMode mode);

/// Mixed-precision quantization of a weight tensor with Fisher scoring.
/// Blocks are scored after clipping, so the low-precision reconstruction used
/// for the impact score is the one that would be stored.
QuantizedTensor quantize_weights_fgmp(const Tensor &w, const FisherMap &fisher, const Threshold &t,
                                      ClipMode clip);

/// Policy-generic form: scoring (and sensitivity-weighted clipping, if
/// selected) use `weights`; FP8 blocks use `fp8_scale`.
QuantizedTensor quantize_fgmp(const Tensor &t, const ScoreWeights &weights, const Threshold &threshold,
                              ClipMode clip, float fp8_scale);

} // namespace fgmp

#endif // FGMP_CLIPPING_HPP
