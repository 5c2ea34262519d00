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
#include "fgmp/simkernel.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace fgmp {

namespace {

constexpr std::string_view kTraceHeader = "# fgmp-trace v1";

struct Field
{
  std::string_view key;
  std::uint64_t GemmTrace::*scalar;
  int unit; // index into block_ops when scalar is null
};

constexpr Field kFields[] = {
  {"m", &GemmTrace::m, -1},
  {"k", &GemmTrace::k, -1},
  {"n", &GemmTrace::n, -1},
  {"ops", &GemmTrace::ops, -1},
  {"cycles", &GemmTrace::cycles, -1},
  {"fp4xfp4", nullptr, 0},
  {"fp8xfp8", nullptr, 1},
  {"fp4w_fp8a", nullptr, 2},
  {"fp8w_fp4a", nullptr, 3},
  {"ppu_invocations", &GemmTrace::ppu_invocations, -1},
};

std::uint64_t &field_ref(GemmTrace &t, const Field &f)
{
  return f.scalar ? t.*(f.scalar) : t.block_ops[static_cast<std::size_t>(f.unit)];
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

} // namespace

std::string format_trace(const GemmTrace &trace)
{
  std::ostringstream os;
  os << kTraceHeader << '\n';
  GemmTrace copy = trace;
  for (const Field &f : kFields)
    os << f.key << '=' << field_ref(copy, f) << '\n';
  return os.str();
}

GemmTrace parse_trace(std::string_view text)
{
  GemmTrace trace;
  std::map<std::string_view, bool> seen;
  bool header = false;
  std::size_t line_no = 0;
  while (!text.empty())
  {
    const std::size_t eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty())
      continue;
    if (line.front() == '#')
    {
      if (line == kTraceHeader)
        header = true;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("trace line " + std::to_string(line_no) + ": expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const Field *field = nullptr;
    for (const Field &f : kFields)
      if (f.key == key)
        field = &f;
    if (field == nullptr)
      throw FormatError("trace line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    if (seen[key])
      throw FormatError("trace: duplicate key '" + std::string(key) + "'");
    seen[key] = true;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
      throw FormatError("trace line " + std::to_string(line_no) + ": bad number '" + std::string(value) + "'");
    field_ref(trace, *field) = v;
  }
  if (!header)
    throw FormatError("trace: missing '" + std::string(kTraceHeader) + "' header");
  for (const Field &f : kFields)
    if (!seen[f.key])
      throw FormatError("trace: missing key '" + std::string(f.key) + "'");
  return trace;
}

} // namespace fgmp
