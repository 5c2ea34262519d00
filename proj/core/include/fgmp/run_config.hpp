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

#ifndef FGMP_RUN_CONFIG_HPP
#define FGMP_RUN_CONFIG_HPP

#include "fgmp/clipping.hpp"
#include "fgmp/costmodel.hpp"
#include "fgmp/precision.hpp"
#include "fgmp/sensitivity.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fgmp {

/// One linear layer of the manifest. Paths are relative to the config file.
struct LayerEntry
{
  std::string name;
  std::filesystem::path weight;
  /// Per-element weight Fisher (.fgt kind 1); required by the fisher policy.
  std::optional<std::filesystem::path> weight_fisher;
  /// Calibration activations, token-major [tokens x channels].
  std::optional<std::filesystem::path> activation;
  /// Per-channel activation Fisher (.fgt kind 2).
  std::optional<std::filesystem::path> activation_fisher;
  /// Optional avg(Q^2) overrides (.fgt kind 3) for the output-error policy.
  /// Without them the statistics are computed from the opposing tensor file.
  std::optional<std::filesystem::path> weight_magnitudes;
  std::optional<std::filesystem::path> activation_magnitudes;
  /// Per-layer thresholds, present after a local-scope calibration.
  std::optional<double> weight_threshold;
  std::optional<double> activation_threshold;
  /// FP8 scale for this layer's activations (calibration amax / 448).
  std::optional<float> activation_fp8_scale;

  friend bool operator==(const LayerEntry &, const LayerEntry &) = default;
};

struct RunConfig
{
  Policy policy = Policy::Fisher;
  /// Target fraction of blocks kept in NVFP4.
  double ratio = 0.9;
  Scope scope = Scope::Global;
  ClipMode clip = ClipMode::SensitivityWeighted;
  /// Global thresholds, present after a global-scope calibration.
  std::optional<double> weight_threshold;
  std::optional<double> activation_threshold;
  EnergyCoefficients energy;
  std::vector<LayerEntry> layers;

  /// Directory relative paths are resolved against (not serialized).
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::filesystem::path &p) const;
  const LayerEntry &layer(std::string_view name) const;
  /// Threshold for a layer, honoring local per-layer overrides.
  std::optional<double> weight_threshold_for(const LayerEntry &l) const;
  std::optional<double> activation_threshold_for(const LayerEntry &l) const;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// Threshold text: shortest round-trip decimal, or "inf".
std::string format_threshold(double v);
/// Throws fgmp::FormatError on malformed text.
double parse_threshold(std::string_view s);

/// Parses and validates a config document. Unknown keys are rejected.
/// Throws fgmp::FormatError.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path &base_dir);
RunConfig load_run_config(const std::filesystem::path &path);

/// Serializes with paths rewritten relative to `target_dir`.
std::string dump_run_config(const RunConfig &cfg, const std::filesystem::path &target_dir);
void save_run_config(const std::filesystem::path &path, const RunConfig &cfg);

} // namespace fgmp

#endif // FGMP_RUN_CONFIG_HPP
