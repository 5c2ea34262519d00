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

#include "fgmp/error.hpp"
#include "fgmp/run_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace fgmp;
namespace fs = std::filesystem;

namespace {

constexpr const char *kFull = R"({
  "policy": "oe",
  "ratio": 0.7,
  "scope": "local",
  "clip": "dynmax",
  "thresholds": {"weights": "0.125", "activations": "inf"},
  "energy": {"e88": 1.0, "e44": 0.6, "e48": 0.8, "e84": 0.8, "mux_tax": 0.01, "ppu_pj_per_block": 30},
  "layers": [
    {"name": "fc1", "weight": "w1.fgt", "weight_fisher": "w1.fisher.fgt", "activation": "x1.fgt",
     "activation_fisher": "x1.fisher.fgt", "thresholds": {"weights": "1e-05", "activations": "2.5"},
     "activation_fp8_scale": "0.0125"},
    {"name": "fc2", "weight": "sub/w2.fgt"}
  ]
})";

} // namespace

TEST(RunConfig, Defaults)
{
  const RunConfig c = parse_run_config("{}", "/base");
  EXPECT_EQ(c.policy, Policy::Fisher);
  EXPECT_EQ(c.ratio, 0.9);
  EXPECT_EQ(c.scope, Scope::Global);
  EXPECT_EQ(c.clip, ClipMode::SensitivityWeighted);
  EXPECT_EQ(c.energy, EnergyCoefficients{});
  EXPECT_TRUE(c.layers.empty());
  EXPECT_FALSE(c.weight_threshold.has_value());
}

TEST(RunConfig, ParsesEveryField)
{
  const RunConfig c = parse_run_config(kFull, "/base");
  EXPECT_EQ(c.policy, Policy::OutputError);
  EXPECT_EQ(c.ratio, 0.7);
  EXPECT_EQ(c.scope, Scope::Local);
  EXPECT_EQ(c.clip, ClipMode::DynMax);
  EXPECT_EQ(c.weight_threshold, 0.125);
  EXPECT_TRUE(std::isinf(*c.activation_threshold));
  EXPECT_EQ(c.energy.e44, 0.6);
  EXPECT_EQ(c.energy.ppu_pj_per_block, 30.0);
  ASSERT_EQ(c.layers.size(), 2u);
  const LayerEntry &l = c.layer("fc1");
  EXPECT_EQ(l.weight, fs::path("w1.fgt"));
  EXPECT_EQ(l.activation_fisher, fs::path("x1.fisher.fgt"));
  EXPECT_EQ(l.weight_threshold, 1e-5);
  EXPECT_EQ(l.activation_fp8_scale, 0.0125f);
  EXPECT_EQ(c.resolve(l.weight), fs::path("/base/w1.fgt"));
  EXPECT_EQ(c.resolve("/abs/x.fgt"), fs::path("/abs/x.fgt"));
  // Local scope reads per-layer thresholds.
  EXPECT_EQ(c.weight_threshold_for(l), 1e-5);
  EXPECT_FALSE(c.weight_threshold_for(c.layer("fc2")).has_value());
  EXPECT_THROW(c.layer("nope"), Error);
}

TEST(RunConfig, GlobalScopeUsesSharedThresholds)
{
  RunConfig c = parse_run_config(kFull, "/base");
  c.scope = Scope::Global;
  EXPECT_EQ(c.weight_threshold_for(c.layer("fc1")), 0.125);
  EXPECT_EQ(c.weight_threshold_for(c.layer("fc2")), 0.125);
}

TEST(RunConfig, Rejections)
{
  const char *bad[] = {
    "not json",
    "[]",
    R"({"bogus": 1})",
    R"({"policy": "fishy"})",
    R"({"policy": 3})",
    R"({"ratio": 1.5})",
    R"({"ratio": "0.9"})",
    R"({"scope": "world"})",
    R"({"clip": "max"})",
    R"({"thresholds": {"weights": "abc"}})",
    R"({"thresholds": {"weights": 0.5}})",
    R"({"thresholds": {"weights": "-1"}})",
    R"({"thresholds": {"bias": "1"}})",
    R"({"energy": {"e44": 1.5}})",
    R"({"energy": {"e99": 1.0}})",
    R"({"layers": {}})",
    R"({"layers": [{"weight": "w.fgt"}]})",
    R"({"layers": [{"name": "a"}]})",
    R"({"layers": [{"name": "a", "weight": "w.fgt", "extra": 1}]})",
    R"({"layers": [{"name": "a", "weight": "w.fgt"}, {"name": "a", "weight": "v.fgt"}]})",
    R"({"layers": [{"name": "a", "weight": "w.fgt", "activation_fp8_scale": "0"}]})",
  };
  for (const char *text : bad)
    EXPECT_THROW(parse_run_config(text, "."), FormatError) << text;
}

TEST(RunConfig, ThresholdText)
{
  for (double v : {0.0, 1e-300, 0.1, 1.0 / 3.0, 123456.789, 5e-324})
    EXPECT_EQ(parse_threshold(format_threshold(v)), v);
  EXPECT_EQ(format_threshold(INFINITY), "inf");
  EXPECT_EQ(format_threshold(0.5), "0.5");
  EXPECT_THROW(parse_threshold(""), FormatError);
  EXPECT_THROW(parse_threshold("1.0x"), FormatError);
  EXPECT_THROW(parse_threshold("nan"), FormatError);
}

TEST(RunConfig, DumpParseRoundTrip)
{
  const RunConfig c = parse_run_config(kFull, "/base");
  const RunConfig back = parse_run_config(dump_run_config(c, "/base"), "/base");
  EXPECT_EQ(back, c);
  EXPECT_EQ(dump_run_config(back, "/base"), dump_run_config(c, "/base"));
}

TEST(RunConfig, SaveRewritesPathsForNewLocation)
{
  const fs::path dir = fs::temp_directory_path() / "fgmp_run_config_test";
  fs::create_directories(dir / "out");
  RunConfig c = parse_run_config(kFull, dir);
  save_run_config(dir / "out" / "cal.json", c);
  const RunConfig back = load_run_config(dir / "out" / "cal.json");
  EXPECT_EQ(back.base_dir, dir / "out");
  for (std::size_t i = 0; i < c.layers.size(); ++i)
    EXPECT_EQ(fs::weakly_canonical(back.resolve(back.layers[i].weight)),
              fs::weakly_canonical(c.resolve(c.layers[i].weight)));
  EXPECT_EQ(back.layers[0].weight, fs::path("../w1.fgt"));
  fs::remove_all(dir);
  EXPECT_THROW(load_run_config(dir / "missing.json"), Error);
}
