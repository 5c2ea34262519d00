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

#include "fgmp_cli.hpp"

#include "fgmp/assignment.hpp"
#include "fgmp/clipping.hpp"
#include "fgmp/costmodel.hpp"
#include "fgmp/error.hpp"
#include "fgmp/parallel.hpp"
#include "fgmp/quant_file.hpp"
#include "fgmp/run_config.hpp"
#include "fgmp/simkernel.hpp"
#include "fgmp/tensor_file.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>

namespace fgmp::cli {

namespace {

namespace fs = std::filesystem;

enum class FileType
{
  Tensor,
  Quantized,
  Trace,
  Unknown,
};

FileType sniff(const std::vector<std::uint8_t> &bytes)
{
  auto starts = [&](std::string_view magic) {
    return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
  };
  if (starts("FGT1"))
    return FileType::Tensor;
  if (starts("FGQ1"))
    return FileType::Quantized;
  if (starts("# fgmp-trace"))
    return FileType::Trace;
  return FileType::Unknown;
}

std::string text_of(const std::vector<std::uint8_t> &bytes)
{
  return {reinterpret_cast<const char *>(bytes.data()), bytes.size()};
}

void write_text(const fs::path &path, const std::string &text)
{
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

/// Tensors and statistics of one manifest layer, loaded as the policy needs them.
struct LoadedLayer
{
  const LayerEntry *entry = nullptr;
  Tensor weight;
  std::optional<Tensor> activation;
  std::optional<FisherMap> weight_fisher;
  /// Per-channel weights for activation blocks (Fisher, ones, or avg W^2).
  std::optional<FisherMap> activation_channels;
  /// avg(X^2) per channel, weighting weight blocks under the output-error policy.
  std::optional<ChannelMagnitudeMap> activation_magnitudes;

  ScoreWeights weight_scoring(Policy policy) const
  {
    switch (policy)
    {
      case Policy::Fisher:
        return ScoreWeights::fisher(*weight_fisher);
      case Policy::OutputError:
        return ScoreWeights::output_error(*activation_magnitudes);
      case Policy::QuantError:
        break;
    }
    return ScoreWeights::uniform();
  }
};

Tensor load_tensor(const RunConfig &cfg, const fs::path &p, Role role, const std::string &layer)
{
  const fs::path full = cfg.resolve(p);
  try
  {
    return to_tensor(read_fgt(full), role, layer);
  }
  catch (const FormatError &e)
  {
    throw FormatError(full.string() + ": " + e.what());
  }
}

template <class Convert>
auto load_stat(const RunConfig &cfg, const fs::path &p, Convert convert)
{
  const fs::path full = cfg.resolve(p);
  const TensorFile f = read_fgt(full);
  try
  {
    return convert(f);
  }
  catch (const Error &e)
  {
    throw FormatError(full.string() + ": " + e.what());
  }
}

/// Per-channel activation weights for the configured policy.
FisherMap activation_channel_weights(const RunConfig &cfg, const LayerEntry &entry, const Tensor &weight)
{
  const auto where = "layer '" + entry.name + "'";
  switch (cfg.policy)
  {
    case Policy::Fisher: {
      if (!entry.activation_fisher)
        throw Error(where + ": the fisher policy needs activation_fisher");
      FisherMap m = load_stat(cfg, *entry.activation_fisher, to_fisher);
      if (m.kind() != FisherKind::PerChannel)
        throw FormatError(cfg.resolve(*entry.activation_fisher).string() +
                          ": activation fisher must be per-channel");
      return m;
    }
    case Policy::OutputError: {
      if (entry.weight_magnitudes)
        return FisherMap(load_stat(cfg, *entry.weight_magnitudes, to_magnitudes).values);
      const std::array<Tensor, 1> samples{weight};
      return FisherMap(calibrate_channel_stats(samples).values);
    }
    case Policy::QuantError:
      break;
  }
  return FisherMap(std::vector<float>(weight.cols(), 1.0f));
}

LoadedLayer load_layer(const RunConfig &cfg, const LayerEntry &entry, bool with_activation)
{
  LoadedLayer l;
  l.entry = &entry;
  const auto where = "layer '" + entry.name + "'";
  l.weight = load_tensor(cfg, entry.weight, Role::Weight, entry.name);
  l.weight.require_blockable();
  l.weight.require_finite();

  if (cfg.policy == Policy::Fisher)
  {
    if (!entry.weight_fisher)
      throw Error(where + ": the fisher policy needs weight_fisher");
    l.weight_fisher = load_stat(cfg, *entry.weight_fisher, to_fisher);
    if (l.weight_fisher->kind() != FisherKind::PerElement)
      throw FormatError(cfg.resolve(*entry.weight_fisher).string() + ": weight fisher must be per-element");
    l.weight_fisher->check_matches(l.weight);
  }

  if (entry.activation && (with_activation || cfg.policy == Policy::OutputError))
  {
    l.activation = load_tensor(cfg, *entry.activation, Role::Activation, entry.name);
    l.activation->require_finite();
    if (l.activation->cols() != l.weight.cols())
      throw Error(where + ": activation has " + std::to_string(l.activation->cols()) +
                  " channels, weight expects " + std::to_string(l.weight.cols()));
  }

  if (cfg.policy == Policy::OutputError)
  {
    if (entry.activation_magnitudes)
      l.activation_magnitudes = load_stat(cfg, *entry.activation_magnitudes, to_magnitudes);
    else if (l.activation)
      l.activation_magnitudes = calibrate_channel_stats(std::span(&*l.activation, 1));
    else
      throw Error(where + ": the oe policy needs activation or activation_magnitudes");
    if (l.activation_magnitudes->values.size() != l.weight.cols())
      throw Error(where + ": activation magnitudes do not match the weight's channel count");
  }

  if (with_activation && l.activation)
  {
    l.activation->require_blockable();
    l.activation_channels = activation_channel_weights(cfg, entry, l.weight);
    if (l.activation_channels->cols() != l.activation->cols())
      throw Error(where + ": activation channel statistics do not match the activation's channel count");
  }
  return l;
}

void apply_overrides(RunConfig &cfg, const std::optional<double> &ratio, const std::string &policy,
                     const std::string &scope, const std::string &clip)
{
  if (ratio)
    cfg.ratio = *ratio;
  if (!policy.empty())
    cfg.policy = *parse_policy(policy);
  if (!scope.empty())
    cfg.scope = *parse_scope(scope);
  if (!clip.empty())
    cfg.clip = *parse_clip_mode(clip);
}

double fp8_percent(std::span<const double> pool, double threshold)
{
  if (pool.empty())
    return 0.0;
  const auto kept = std::count_if(pool.begin(), pool.end(), [&](double s) { return s > threshold; });
  return 100.0 * static_cast<double>(kept) / static_cast<double>(pool.size());
}

// ---------------------------------------------------------------------------

struct CalibrateArgs
{
  std::string config;
  std::string out;
  std::optional<double> ratio;
  std::string policy, scope, clip;
};

int cmd_calibrate(const CalibrateArgs &args, std::ostream &out)
{
  RunConfig cfg = load_run_config(args.config);
  apply_overrides(cfg, args.ratio, args.policy, args.scope, args.clip);
  if (cfg.layers.empty())
    throw Error(args.config + ": manifest lists no layers");

  const unsigned threads = default_threads();
  std::vector<LoadedLayer> layers;
  layers.reserve(cfg.layers.size());
  for (const auto &entry : cfg.layers)
    layers.push_back(load_layer(cfg, entry, true));

  std::vector<LayerScoring> weight_pool;
  for (const auto &l : layers)
    weight_pool.push_back({&l.weight, l.weight_scoring(cfg.policy), std::nullopt});
  const Calibration wcal = calibrate_threshold(
    weight_pool, {cfg.ratio, cfg.scope, cfg.clip, Role::Weight, threads});

  std::vector<LayerScoring> act_pool;
  std::vector<std::size_t> act_layer;
  for (std::size_t i = 0; i < layers.size(); ++i)
  {
    auto &l = layers[i];
    if (!l.activation)
      continue;
    const float scale = fp8_tensor_scale(l.activation->data());
    cfg.layers[i].activation_fp8_scale = scale;
    act_pool.push_back({&*l.activation, ScoreWeights::fisher(*l.activation_channels), scale});
    act_layer.push_back(i);
  }
  std::optional<Calibration> acal;
  if (!act_pool.empty())
    acal = calibrate_threshold(act_pool, {cfg.ratio, cfg.scope, ClipMode::DynMax, Role::Activation, threads});

  if (cfg.scope == Scope::Global)
  {
    cfg.weight_threshold = wcal.for_layer(0).value;
    cfg.activation_threshold = acal ? std::optional(acal->for_layer(0).value) : std::nullopt;
    for (auto &e : cfg.layers)
      e.weight_threshold = e.activation_threshold = std::nullopt;
  }
  else
  {
    cfg.weight_threshold = cfg.activation_threshold = std::nullopt;
    for (std::size_t i = 0; i < cfg.layers.size(); ++i)
    {
      cfg.layers[i].weight_threshold = wcal.for_layer(i).value;
      cfg.layers[i].activation_threshold = std::nullopt;
    }
    if (acal)
      for (std::size_t j = 0; j < act_layer.size(); ++j)
        cfg.layers[act_layer[j]].activation_threshold = acal->for_layer(j).value;
  }

  out << fmt::format("policy={} ratio={} scope={} clip={}\n", to_string(cfg.policy), cfg.ratio,
                     to_string(cfg.scope), to_string(cfg.clip));
  out << fmt::format("{:<20}{:>12}{:>12}{:>12}{:>12}\n", "layer", "w blocks", "w fp8 %", "x blocks",
                     "x fp8 %");
  std::size_t w_total = 0, w_fp8 = 0, x_total = 0, x_fp8 = 0;
  for (std::size_t i = 0; i < layers.size(); ++i)
  {
    const auto &pool = wcal.pools[i];
    const double wt = wcal.for_layer(i).value;
    w_total += pool.size();
    w_fp8 += static_cast<std::size_t>(std::count_if(pool.begin(), pool.end(), [&](double s) { return s > wt; }));
    std::string xb = "-", xp = "-";
    const auto it = std::find(act_layer.begin(), act_layer.end(), i);
    if (it != act_layer.end())
    {
      const std::size_t j = static_cast<std::size_t>(it - act_layer.begin());
      const auto &apool = acal->pools[j];
      const double at = acal->for_layer(j).value;
      x_total += apool.size();
      x_fp8 += static_cast<std::size_t>(std::count_if(apool.begin(), apool.end(), [&](double s) { return s > at; }));
      xb = std::to_string(apool.size());
      xp = fmt::format("{:.2f}", fp8_percent(apool, at));
    }
    out << fmt::format("{:<20}{:>12}{:>12.2f}{:>12}{:>12}\n", cfg.layers[i].name, pool.size(),
                       fp8_percent(pool, wt), xb, xp);
  }
  out << fmt::format("{:<20}{:>12}{:>12.2f}{:>12}{:>12}\n", "total", w_total,
                     w_total ? 100.0 * static_cast<double>(w_fp8) / static_cast<double>(w_total) : 0.0,
                     x_total, x_total ? fmt::format("{:.2f}", 100.0 * static_cast<double>(x_fp8) / static_cast<double>(x_total)) : "-");
  if (cfg.scope == Scope::Global)
  {
    out << "weight_threshold=" << format_threshold(*cfg.weight_threshold) << '\n';
    if (cfg.activation_threshold)
      out << "activation_threshold=" << format_threshold(*cfg.activation_threshold) << '\n';
  }

  const fs::path target = args.out.empty() ? fs::path(args.config) : fs::path(args.out);
  save_run_config(target, cfg);
  out << "wrote " << target.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct QuantizeArgs
{
  std::string config;
  std::string layer;
  std::string out;
  std::string clip;
};

void print_summary(std::ostream &out, const fs::path &path, const QuantizedTensor &qt)
{
  const MemoryBreakdown m = memory_bits(qt);
  out << fmt::format("{}: {}x{} nvfp4={} fp8={} bits={} savings={:.2f}%\n", path.string(), qt.rows, qt.cols,
                     m.nvfp4_blocks, m.fp8_blocks, m.total_bits(), 100.0 * m.savings());
}

int cmd_quantize(const QuantizeArgs &args, std::ostream &out)
{
  RunConfig cfg = load_run_config(args.config);
  apply_overrides(cfg, std::nullopt, "", "", args.clip);
  if (cfg.layers.empty())
    throw Error(args.config + ": manifest lists no layers");
  fs::create_directories(args.out);

  MemoryBreakdown total;
  for (const auto &entry : cfg.layers)
  {
    if (!args.layer.empty() && entry.name != args.layer)
      continue;
    const auto wt = cfg.weight_threshold_for(entry);
    if (!wt)
      throw Error("layer '" + entry.name + "': no weight threshold; run `fgmp calibrate` first");
    const auto at = cfg.activation_threshold_for(entry);
    const LoadedLayer l = load_layer(cfg, entry, at.has_value());

    Threshold t{*wt, cfg.scope, Role::Weight, cfg.ratio};
    const QuantizedTensor wq =
      quantize_fgmp(l.weight, l.weight_scoring(cfg.policy), t, cfg.clip, fp8_tensor_scale(l.weight.data()));
    const fs::path wpath = fs::path(args.out) / (entry.name + ".w.fgq");
    write_fgq(wpath, wq);
    print_summary(out, wpath, wq);
    total += memory_bits(wq);

    if (l.activation && at)
    {
      if (!entry.activation_fp8_scale)
        throw Error("layer '" + entry.name + "': no activation_fp8_scale; run `fgmp calibrate` first");
      Threshold ta{*at, cfg.scope, Role::Activation, cfg.ratio};
      const OnlineQuantization xq =
        assign_online(*l.activation, *l.activation_channels, ta, *entry.activation_fp8_scale);
      const fs::path xpath = fs::path(args.out) / (entry.name + ".x.fgq");
      write_fgq(xpath, xq.tensor);
      print_summary(out, xpath, xq.tensor);
    }
  }
  if (!args.layer.empty() && total.blocks() == 0)
    throw Error("config has no layer named '" + args.layer + "'");
  out << fmt::format("weights: nvfp4={} fp8={} fp4_fraction={:.4f} savings={:.2f}%\n", total.nvfp4_blocks,
                     total.fp8_blocks,
                     total.blocks() ? static_cast<double>(total.nvfp4_blocks) / static_cast<double>(total.blocks()) : 0.0,
                     100.0 * total.savings());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs
{
  std::string config;
  std::string weights;
  std::string input;
  std::string layer;
  std::string ppu_layer;
  std::string out;
};

struct OnlineQuantizer
{
  FisherMap channels;
  Threshold threshold;
  float fp8_scale = 1.0f;
};

OnlineQuantizer online_quantizer(const RunConfig &cfg, const std::string &name)
{
  const LayerEntry &entry = cfg.layer(name);
  const auto at = cfg.activation_threshold_for(entry);
  if (!at || !entry.activation_fp8_scale)
    throw Error("layer '" + name + "': no calibrated activation threshold/scale; run `fgmp calibrate` first");
  const Tensor weight = load_tensor(cfg, entry.weight, Role::Weight, entry.name);
  return {activation_channel_weights(cfg, entry, weight), Threshold{*at, cfg.scope, Role::Activation, cfg.ratio},
          *entry.activation_fp8_scale};
}

int cmd_simulate(const SimulateArgs &args, std::ostream &out)
{
  std::optional<RunConfig> cfg;
  if (!args.config.empty())
    cfg = load_run_config(args.config);
  const EnergyCoefficients coeff = cfg ? cfg->energy : EnergyCoefficients{};

  const QuantizedTensor w = read_fgq(args.weights);

  QuantizedTensor x;
  const auto input_bytes = read_bytes(args.input);
  switch (sniff(input_bytes))
  {
    case FileType::Quantized:
      try
      {
        x = decode_fgq(input_bytes);
      }
      catch (const FormatError &e)
      {
        throw FormatError(args.input + ": " + e.what());
      }
      break;
    case FileType::Tensor: {
      if (!cfg || args.layer.empty())
        throw Error(args.input + ": a raw activation tensor needs --config and --layer to quantize it");
      Tensor act;
      try
      {
        act = to_tensor(decode_fgt(input_bytes), Role::Activation, args.layer);
      }
      catch (const FormatError &e)
      {
        throw FormatError(args.input + ": " + e.what());
      }
      act.require_finite();
      const OnlineQuantizer q = online_quantizer(*cfg, args.layer);
      x = assign_online(act, q.channels, q.threshold, q.fp8_scale).tensor;
      break;
    }
    default:
      throw FormatError(args.input + ": not an .fgt or .fgq file");
  }

  GemmOptions gopt;
  gopt.threads = default_threads();
  GemmResult r = gemm_fgmp(w, x, gopt);

  const fs::path prefix(args.out);
  if (prefix.has_parent_path())
    fs::create_directories(prefix.parent_path());
  fs::path ypath;
  if (!args.ppu_layer.empty())
  {
    if (!cfg)
      throw Error("--ppu-layer needs --config");
    const OnlineQuantizer q = online_quantizer(*cfg, args.ppu_layer);
    const QuantizedTensor yq = ppu_pipeline(r.y, q.channels, q.threshold, q.fp8_scale, &r.trace);
    ypath = prefix.string() + ".y.fgq";
    write_fgq(ypath, yq);
    out << fmt::format("output: {}x{} nvfp4={} fp8={}\n", yq.rows, yq.cols, yq.count(Precision::NvFp4),
                       yq.count(Precision::Fp8));
  }
  else
  {
    ypath = prefix.string() + ".y.fgt";
    write_fgt(ypath, to_file(r.y));
  }

  const fs::path tpath = prefix.string() + ".trace";
  write_text(tpath, format_trace(r.trace));
  const CostReport report = make_report(r.trace, coeff, memory_bits(w));
  const fs::path rpath = prefix.string() + ".report";
  write_text(rpath, format_report_records(report));

  out << format_report_table(report);
  out << "wrote " << ypath.string() << ", " << tpath.string() << ", " << rpath.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs
{
  std::vector<std::string> traces;
  std::string config;
  std::string format = "both";
};

int cmd_report(const ReportArgs &args, std::ostream &out)
{
  if (args.traces.empty())
    throw Error("report: no traces given");
  const EnergyCoefficients coeff = args.config.empty() ? EnergyCoefficients{} : load_run_config(args.config).energy;
  GemmTrace total;
  bool first = true;
  for (const auto &path : args.traces)
  {
    GemmTrace t;
    try
    {
      t = parse_trace(text_of(read_bytes(path)));
    }
    catch (const FormatError &e)
    {
      throw FormatError(path + ": " + e.what());
    }
    if (first)
      total = t;
    else
      total += t;
    first = false;
  }
  const CostReport report = make_report(total, coeff);
  if (args.format == "table" || args.format == "both")
    out << format_report_table(report);
  if (args.format == "records" || args.format == "both")
    out << format_report_records(report);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_inspect(const std::string &path, std::ostream &out)
{
  const auto bytes = read_bytes(path);
  try
  {
    switch (sniff(bytes))
    {
      case FileType::Tensor: {
        const TensorFile f = decode_fgt(bytes);
        std::string dims;
        for (auto d : f.dims)
          dims += (dims.empty() ? "" : "x") + std::to_string(d);
        float lo = 0, hi = 0;
        double sum = 0;
        std::size_t nonfinite = 0;
        if (!f.data.empty())
        {
          lo = hi = f.data.front();
          for (float v : f.data)
          {
            if (!std::isfinite(v))
            {
              ++nonfinite;
              continue;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
          }
        }
        out << fmt::format("format=fgt\nkind={}\ndims={}\nelements={}\nmin={}\nmax={}\nmean={}\nnonfinite={}\n",
                           to_string(f.kind), dims, f.data.size(), lo, hi,
                           f.data.empty() ? 0.0 : sum / static_cast<double>(f.data.size()), nonfinite);
        if (nonfinite > 0)
          throw FormatError("contains non-finite values");
        if (f.kind != TensorFileKind::Tensor && lo < 0.0f)
          throw FormatError(std::string(to_string(f.kind)) + " file contains negative values");
        if (f.kind == TensorFileKind::PerElementFisher && f.dims.size() != 2)
          throw FormatError("per-element fisher must be 2-D");
        if ((f.kind == TensorFileKind::PerChannelFisher || f.kind == TensorFileKind::ChannelMagnitudes) &&
            f.dims.size() != 1)
          throw FormatError(std::string(to_string(f.kind)) + " must be 1-D");
        return kExitOk;
      }
      case FileType::Quantized: {
        const QuantizedTensor qt = decode_fgq(bytes);
        const MemoryBreakdown m = memory_bits(qt);
        out << fmt::format("format=fgq\nrows={}\ncols={}\nblocks={}\nnvfp4_blocks={}\nfp8_blocks={}\n"
                           "fp8_tensor_scale={}\ntotal_bits={}\nsavings_percent={:.4f}\n",
                           qt.rows, qt.cols, qt.block_count(), m.nvfp4_blocks, m.fp8_blocks, qt.fp8_tensor_scale,
                           m.total_bits(), 100.0 * m.savings());
        return kExitOk;
      }
      case FileType::Trace: {
        const GemmTrace t = parse_trace(text_of(bytes));
        out << "format=trace\n" << format_trace(t);
        return kExitOk;
      }
      case FileType::Unknown:
        break;
    }
  }
  catch (const FormatError &e)
  {
    throw FormatError(path + ": " + e.what());
  }
  throw FormatError(path + ": unrecognized file (expected FGT1, FGQ1 or trace)");
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Fine-grained mixed-precision (NVFP4/FP8) quantization toolkit", "fgmp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  const std::vector<std::string> policies{"fisher", "qe", "oe"};
  const std::vector<std::string> scopes{"local", "global"};
  const std::vector<std::string> clips{"sw", "dynmax"};

  CalibrateArgs cal;
  auto *calibrate = app.add_subcommand("calibrate", "Compute weight/activation thresholds into the config");
  calibrate->add_option("--config", cal.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--out", cal.out, "Write the updated config here instead of in place");
  calibrate->add_option("--ratio", cal.ratio, "Target NVFP4 block fraction")->check(CLI::Range(0.0, 1.0));
  calibrate->add_option("--policy", cal.policy, "fisher | qe | oe")->check(CLI::IsMember(policies));
  calibrate->add_option("--scope", cal.scope, "global | local")->check(CLI::IsMember(scopes));
  calibrate->add_option("--clip", cal.clip, "sw | dynmax")->check(CLI::IsMember(clips));

  QuantizeArgs qa;
  auto *quantize = app.add_subcommand("quantize", "Quantize manifest layers to .fgq files");
  quantize->add_option("--config", qa.config, "Calibrated run config")->required()->check(CLI::ExistingFile);
  quantize->add_option("--layer", qa.layer, "Only this layer");
  quantize->add_option("--out", qa.out, "Output directory")->required();
  quantize->add_option("--clip", qa.clip, "Override the weight clipping mode")->check(CLI::IsMember(clips));

  SimulateArgs sa;
  auto *simulate = app.add_subcommand("simulate", "Run the mixed-precision GEMM (and PPU) simulation");
  simulate->add_option("--config", sa.config, "Run config")->check(CLI::ExistingFile);
  simulate->add_option("--weights", sa.weights, "Quantized weights [M x K] (.fgq)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--input", sa.input, "Activations [N x K] (.fgt or .fgq)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--layer", sa.layer, "Layer whose activation statistics quantize a raw .fgt input");
  simulate->add_option("--ppu-layer", sa.ppu_layer, "Quantize the output with this layer's activation statistics");
  simulate->add_option("--out", sa.out, "Output path prefix")->required();

  ReportArgs ra;
  auto *report = app.add_subcommand("report", "Aggregate traces into a cost report");
  report->add_option("traces", ra.traces, "Trace files")->required()->check(CLI::ExistingFile);
  report->add_option("--config", ra.config, "Config supplying energy coefficients")->check(CLI::ExistingFile);
  report->add_option("--format", ra.format, "table | records | both")
    ->check(CLI::IsMember({"table", "records", "both"}));

  std::string inspect_path;
  auto *inspect = app.add_subcommand("inspect", "Validate and describe an .fgt/.fgq/trace file");
  inspect->add_option("file", inspect_path, "File to inspect")->required()->check(CLI::ExistingFile);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::CallForAllHelp &)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  }
  catch (const CLI::ParseError &e)
  {
    err << "fgmp: " << e.what() << "\n";
    return kExitUsage;
  }

  try
  {
    if (calibrate->parsed())
      return cmd_calibrate(cal, out);
    if (quantize->parsed())
      return cmd_quantize(qa, out);
    if (simulate->parsed())
      return cmd_simulate(sa, out);
    if (report->parsed())
      return cmd_report(ra, out);
    if (inspect->parsed())
      return cmd_inspect(inspect_path, out);
  }
  catch (const std::exception &e)
  {
    err << "fgmp: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

} // namespace fgmp::cli
