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

#ifndef FGMP_ASSIGNMENT_HPP
#define FGMP_ASSIGNMENT_HPP

#include "fgmp/blockquant.hpp"
#include "fgmp/clipping.hpp"
#include "fgmp/precision.hpp"
#include "fgmp/sensitivity.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fgmp {

/// Nearest-rank percentile: element ceil(ratio * n) - 1 of the sorted scores
/// (ratio 0 gives the minimum). Throws fgmp::Error on empty input or a ratio
/// outside [0, 1].
double percentile_nearest_rank(std::span<const double> scores, double ratio);

/// Both quantizations of one block and the score of choosing NVFP4 over FP8.
struct BlockEvaluation
{
  NvFp4Block low;
  Fp8Block high;
  BlockDelta delta{};
  ImpactScore score;
};

BlockEvaluation evaluate_block(const Tensor &t, std::size_t index, const ScoreWeights &weights,
                               ClipMode clip, float fp8_scale);

/// Impact score of every block of `t` in block order.
std::vector<double> score_blocks(const Tensor &t, const ScoreWeights &weights, ClipMode clip,
                                 float fp8_scale, unsigned threads = 1);

/// One tensor contributing to a calibration pool.
struct LayerScoring
{
  const Tensor *tensor = nullptr;
  ScoreWeights weights;
  /// FP8 scale for the high-precision reconstruction; defaults to the tensor's amax / 448.
  std::optional<float> fp8_scale;
};

struct CalibrationOptions
{
  double ratio = 0.9;
  Scope scope = Scope::Global;
  ClipMode clip = ClipMode::DynMax;
  Role domain = Role::Weight;
  unsigned threads = 1;
};

struct Calibration
{
  /// One entry for global scope, one per layer for local scope.
  std::vector<Threshold> thresholds;
  /// Score pool of each layer, in layer order.
  std::vector<std::vector<double>> pools;

  const Threshold &for_layer(std::size_t layer) const;
};

Calibration calibrate_from_pools(std::vector<std::vector<double>> pools, double ratio, Scope scope,
                                 Role domain);

/// Scores every block of every layer and derives the threshold(s). Activation
/// calibration always scores with dynamic-max scales regardless of `clip`.
Calibration calibrate_threshold(std::span<const LayerScoring> layers, const CalibrationOptions &options);

/// FP8 iff score > threshold; ties stay NVFP4.
PrecisionAssignment assign_precision(std::span<const double> scores, const Threshold &t);
PrecisionAssignment assign_precision(std::span<const ImpactScore> scores, const Threshold &t);

/// Materialize a quantized tensor for a given assignment.
QuantizedTensor build_quantized(const Tensor &t, const PrecisionAssignment &assignment,
                                const ScoreWeights &weights, ClipMode clip, float fp8_scale);

struct OnlineQuantization
{
  QuantizedTensor tensor;
  PrecisionAssignment assignment;
};

/// Streaming activation quantizer: decides and emits each block as it is
/// scored against a fixed threshold, using dynamic-max NVFP4 scales and the
/// per-channel Fisher map. Throws fgmp::Error if the map is not per-channel or
/// its length differs from the activation's channel count.
OnlineQuantization assign_online(const Tensor &act, const FisherMap &g2_channels, const Threshold &t,
                                 float fp8_scale);

} // namespace fgmp

#endif // FGMP_ASSIGNMENT_HPP
