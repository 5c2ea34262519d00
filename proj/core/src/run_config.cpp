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

#include "fgmp/run_config.hpp"

#include "fgmp/error.hpp"
#include "fgmp/tensor_file.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace fgmp {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void reject_unknown(const Json &obj, std::initializer_list<std::string_view> allowed, const std::string &where)
{
  if (!obj.is_object())
    throw FormatError(where + ": expected an object");
  for (const auto &[key, value] : obj.items())
  {
    bool ok = false;
    for (auto a : allowed)
      ok = ok || key == a;
    if (!ok)
      throw FormatError(where + ": unknown key '" + key + "'");
  }
}

std::string get_string(const Json &obj, const char *key, const std::string &where)
{
  const auto &v = obj.at(key);
  if (!v.is_string())
    throw FormatError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::optional<std::string> opt_string(const Json &obj, const char *key, const std::string &where)
{
  if (!obj.contains(key) || obj.at(key).is_null())
    return std::nullopt;
  return get_string(obj, key, where);
}

std::optional<fs::path> opt_path(const Json &obj, const char *key, const std::string &where)
{
  auto s = opt_string(obj, key, where);
  if (!s)
    return std::nullopt;
  return fs::path(*s);
}

std::optional<double> opt_threshold(const Json &obj, const char *key, const std::string &where)
{
  auto s = opt_string(obj, key, where);
  if (!s)
    return std::nullopt;
  const double v = parse_threshold(*s);
  if (!(v >= 0.0))
    throw FormatError(where + "." + key + ": threshold must be nonnegative");
  return v;
}

void read_thresholds(const Json &obj, std::optional<double> &weights, std::optional<double> &activations,
                     const std::string &where)
{
  reject_unknown(obj, {"weights", "activations"}, where);
  weights = opt_threshold(obj, "weights", where);
  activations = opt_threshold(obj, "activations", where);
}

Json thresholds_json(const std::optional<double> &weights, const std::optional<double> &activations)
{
  Json t = Json::object();
  if (weights)
    t["weights"] = format_threshold(*weights);
  if (activations)
    t["activations"] = format_threshold(*activations);
  return t;
}

std::string format_float(float v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

} // namespace

std::string format_threshold(double v)
{
  if (std::isinf(v) && v > 0)
    return "inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_threshold(std::string_view s)
{
  if (s == "inf")
    return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw FormatError("malformed threshold '" + std::string(s) + "'");
  return v;
}

fs::path RunConfig::resolve(const fs::path &p) const
{
  return p.is_absolute() ? p : base_dir / p;
}

const LayerEntry &RunConfig::layer(std::string_view name) const
{
  for (const auto &l : layers)
    if (l.name == name)
      return l;
  throw Error("config has no layer named '" + std::string(name) + "'");
}

std::optional<double> RunConfig::weight_threshold_for(const LayerEntry &l) const
{
  return scope == Scope::Local ? l.weight_threshold : weight_threshold;
}

std::optional<double> RunConfig::activation_threshold_for(const LayerEntry &l) const
{
  return scope == Scope::Local ? l.activation_threshold : activation_threshold;
}

RunConfig parse_run_config(std::string_view json_text, const fs::path &base_dir)
{
  Json doc;
  try
  {
    doc = Json::parse(json_text);
  }
  catch (const Json::parse_error &e)
  {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  try
  {
    reject_unknown(doc, {"policy", "ratio", "scope", "clip", "thresholds", "energy", "layers"}, "config");
    if (doc.contains("policy"))
    {
      const auto p = parse_policy(get_string(doc, "policy", "config"));
      if (!p)
        throw FormatError("config.policy: expected fisher, qe or oe");
      cfg.policy = *p;
    }
    if (doc.contains("ratio"))
    {
      if (!doc["ratio"].is_number())
        throw FormatError("config.ratio: expected a number");
      cfg.ratio = doc["ratio"].get<double>();
      if (!(cfg.ratio >= 0.0 && cfg.ratio <= 1.0))
        throw FormatError("config.ratio: must lie in [0, 1]");
    }
    if (doc.contains("scope"))
    {
      const auto s = parse_scope(get_string(doc, "scope", "config"));
      if (!s)
        throw FormatError("config.scope: expected local or global");
      cfg.scope = *s;
    }
    if (doc.contains("clip"))
    {
      const auto c = parse_clip_mode(get_string(doc, "clip", "config"));
      if (!c)
        throw FormatError("config.clip: expected sw or dynmax");
      cfg.clip = *c;
    }
    if (doc.contains("thresholds"))
      read_thresholds(doc["thresholds"], cfg.weight_threshold, cfg.activation_threshold, "config.thresholds");
    if (doc.contains("energy"))
    {
      const Json &e = doc["energy"];
      reject_unknown(e, {"e88", "e44", "e48", "e84", "mux_tax", "ppu_pj_per_block"}, "config.energy");
      auto num = [&](const char *key, double &dst) {
        if (!e.contains(key))
          return;
        if (!e[key].is_number())
          throw FormatError(std::string("config.energy.") + key + ": expected a number");
        dst = e[key].get<double>();
      };
      num("e88", cfg.energy.e88);
      num("e44", cfg.energy.e44);
      num("e48", cfg.energy.e48);
      num("e84", cfg.energy.e84);
      num("mux_tax", cfg.energy.mux_tax);
      num("ppu_pj_per_block", cfg.energy.ppu_pj_per_block);
      try
      {
        cfg.energy.validate();
      }
      catch (const Error &err)
      {
        throw FormatError(std::string("config.energy: ") + err.what());
      }
    }
    if (doc.contains("layers"))
    {
      const Json &layers = doc["layers"];
      if (!layers.is_array())
        throw FormatError("config.layers: expected an array");
      std::set<std::string> names;
      for (std::size_t i = 0; i < layers.size(); ++i)
      {
        const Json &l = layers[i];
        const std::string where = "config.layers[" + std::to_string(i) + "]";
        reject_unknown(l,
                       {"name", "weight", "weight_fisher", "activation", "activation_fisher",
                        "weight_magnitudes", "activation_magnitudes", "thresholds", "activation_fp8_scale"},
                       where);
        LayerEntry e;
        e.name = get_string(l, "name", where);
        if (e.name.empty() || !names.insert(e.name).second)
          throw FormatError(where + ".name: empty or duplicate layer name");
        e.weight = get_string(l, "weight", where);
        e.weight_fisher = opt_path(l, "weight_fisher", where);
        e.activation = opt_path(l, "activation", where);
        e.activation_fisher = opt_path(l, "activation_fisher", where);
        e.weight_magnitudes = opt_path(l, "weight_magnitudes", where);
        e.activation_magnitudes = opt_path(l, "activation_magnitudes", where);
        if (l.contains("thresholds"))
          read_thresholds(l["thresholds"], e.weight_threshold, e.activation_threshold, where + ".thresholds");
        if (auto s = opt_string(l, "activation_fp8_scale", where))
        {
          float v = 0.0f;
          const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
          if (ec != std::errc{} || ptr != s->data() + s->size() || !(v > 0.0f) || !std::isfinite(v))
            throw FormatError(where + ".activation_fp8_scale: expected a positive decimal string");
          e.activation_fp8_scale = v;
        }
        cfg.layers.push_back(std::move(e));
      }
    }
  }
  catch (const Json::exception &e)
  {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const fs::path &path)
{
  const auto bytes = read_bytes(path);
  try
  {
    return parse_run_config(std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()),
                            path.parent_path());
  }
  catch (const FormatError &e)
  {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string dump_run_config(const RunConfig &cfg, const fs::path &target_dir)
{
  auto rel = [&](const fs::path &p) {
    if (p.is_absolute())
      return p.generic_string();
    const fs::path from = target_dir.empty() ? fs::path(".") : target_dir;
    const fs::path base = cfg.base_dir.empty() ? fs::path(".") : cfg.base_dir;
    return fs::proximate(base / p, from).generic_string();
  };

  Json doc = Json::object();
  doc["policy"] = to_string(cfg.policy);
  doc["ratio"] = cfg.ratio;
  doc["scope"] = to_string(cfg.scope);
  doc["clip"] = to_string(cfg.clip);
  if (cfg.weight_threshold || cfg.activation_threshold)
    doc["thresholds"] = thresholds_json(cfg.weight_threshold, cfg.activation_threshold);
  doc["energy"] = {{"e88", cfg.energy.e88},         {"e44", cfg.energy.e44},
                   {"e48", cfg.energy.e48},         {"e84", cfg.energy.e84},
                   {"mux_tax", cfg.energy.mux_tax}, {"ppu_pj_per_block", cfg.energy.ppu_pj_per_block}};
  Json layers = Json::array();
  for (const auto &l : cfg.layers)
  {
    Json j = Json::object();
    j["name"] = l.name;
    j["weight"] = rel(l.weight);
    if (l.weight_fisher)
      j["weight_fisher"] = rel(*l.weight_fisher);
    if (l.activation)
      j["activation"] = rel(*l.activation);
    if (l.activation_fisher)
      j["activation_fisher"] = rel(*l.activation_fisher);
    if (l.weight_magnitudes)
      j["weight_magnitudes"] = rel(*l.weight_magnitudes);
    if (l.activation_magnitudes)
      j["activation_magnitudes"] = rel(*l.activation_magnitudes);
    if (l.weight_threshold || l.activation_threshold)
      j["thresholds"] = thresholds_json(l.weight_threshold, l.activation_threshold);
    if (l.activation_fp8_scale)
      j["activation_fp8_scale"] = format_float(*l.activation_fp8_scale);
    layers.push_back(std::move(j));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

void save_run_config(const fs::path &path, const RunConfig &cfg)
{
  const std::string text = dump_run_config(cfg, path.parent_path());
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

} // namespace fgmp
