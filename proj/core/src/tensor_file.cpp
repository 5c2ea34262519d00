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

#include "fgmp/tensor_file.hpp"

#include "byte_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace fgmp {

namespace {

constexpr std::string_view kMagic = "FGT1";
constexpr std::uint8_t kDtypeBinary32 = 0;

std::uint64_t element_count(const std::vector<std::uint64_t> &dims, const char *what)
{
  std::uint64_t n = 1;
  for (auto d : dims)
    n = detail::checked_mul(n, d, what);
  return n;
}

} // namespace

const char *to_string(TensorFileKind k) noexcept
{
  switch (k)
  {
    case TensorFileKind::Tensor:
      return "tensor";
    case TensorFileKind::PerElementFisher:
      return "per-element fisher";
    case TensorFileKind::PerChannelFisher:
      return "per-channel fisher";
    case TensorFileKind::ChannelMagnitudes:
      return "channel magnitudes";
  }
  return "?";
}

std::vector<std::uint8_t> encode_fgt(const TensorFile &f)
{
  if (f.dims.empty() || f.dims.size() > 255)
    throw Error("encode_fgt: ndim must be in [1, 255]");
  if (element_count(f.dims, "encode_fgt") != f.data.size())
    throw Error("encode_fgt: payload size does not match dims");
  detail::ByteWriter w;
  w.reserve(8 + 8 * f.dims.size() + 4 * f.data.size());
  w.bytes(kMagic);
  w.u8(kDtypeBinary32);
  w.u8(static_cast<std::uint8_t>(f.kind));
  w.u8(static_cast<std::uint8_t>(f.dims.size()));
  w.u8(0);
  for (auto d : f.dims)
    w.u64(d);
  for (float v : f.data)
    w.f32(v);
  return w.take();
}

TensorFile decode_fgt(std::span<const std::uint8_t> bytes)
{
  detail::ByteReader r(bytes, "fgt");
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin()))
    throw FormatError("fgt: bad magic (expected FGT1)");
  if (const auto dtype = r.u8(); dtype != kDtypeBinary32)
    throw FormatError("fgt: unsupported dtype code " + std::to_string(dtype));
  const auto kind = r.u8();
  if (kind > static_cast<std::uint8_t>(TensorFileKind::ChannelMagnitudes))
    throw FormatError("fgt: unknown kind code " + std::to_string(kind));
  const auto ndim = r.u8();
  if (ndim == 0)
    throw FormatError("fgt: ndim must be at least 1");
  if (r.u8() != 0)
    throw FormatError("fgt: nonzero pad byte");

  TensorFile f;
  f.kind = static_cast<TensorFileKind>(kind);
  f.dims.resize(ndim);
  for (auto &d : f.dims)
    d = r.u64();
  const std::uint64_t count = element_count(f.dims, "fgt");
  if (detail::checked_mul(count, 4, "fgt") != r.remaining())
    throw FormatError("fgt: payload is " + std::to_string(r.remaining()) + " bytes, dims imply " +
                      std::to_string(count * 4));
  f.data.resize(count);
  for (auto &v : f.data)
    v = r.f32();
  r.expect_end();
  return f;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad())
    throw Error(path.string() + ": read failed");
  return bytes;
}

void write_bytes(const std::filesystem::path &path, std::span<const std::uint8_t> bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw Error(path.string() + ": write failed");
}

TensorFile read_fgt(const std::filesystem::path &path)
{
  try
  {
    return decode_fgt(read_bytes(path));
  }
  catch (const FormatError &e)
  {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_fgt(const std::filesystem::path &path, const TensorFile &f)
{
  write_bytes(path, encode_fgt(f));
}

TensorFile to_file(const Tensor &t)
{
  return {TensorFileKind::Tensor, {t.rows(), t.cols()}, {t.data().begin(), t.data().end()}};
}

TensorFile to_file(const FisherMap &m)
{
  if (m.kind() == FisherKind::PerElement)
    return {TensorFileKind::PerElementFisher, {m.rows(), m.cols()}, {m.values().begin(), m.values().end()}};
  return {TensorFileKind::PerChannelFisher, {m.cols()}, {m.values().begin(), m.values().end()}};
}

TensorFile to_file(const ChannelMagnitudeMap &m)
{
  return {TensorFileKind::ChannelMagnitudes, {m.values.size()}, m.values};
}

Tensor to_tensor(const TensorFile &f, Role role, std::string layer)
{
  if (f.kind != TensorFileKind::Tensor)
    throw FormatError(std::string("expected a tensor file, got ") + to_string(f.kind));
  if (f.dims.size() == 1)
    return Tensor(1, f.dims[0], f.data, role, std::move(layer));
  if (f.dims.size() != 2)
    throw FormatError("expected a 1-D or 2-D tensor, got " + std::to_string(f.dims.size()) + " dims");
  return Tensor(f.dims[0], f.dims[1], f.data, role, std::move(layer));
}

FisherMap to_fisher(const TensorFile &f)
{
  try
  {
    if (f.kind == TensorFileKind::PerElementFisher && f.dims.size() == 2)
      return FisherMap(f.dims[0], f.dims[1], f.data);
    if (f.kind == TensorFileKind::PerChannelFisher && f.dims.size() == 1)
      return FisherMap(f.data);
  }
  catch (const Error &e)
  {
    throw FormatError(e.what());
  }
  throw FormatError(std::string("expected a 2-D per-element or 1-D per-channel fisher file, got ") +
                    to_string(f.kind) + " with " + std::to_string(f.dims.size()) + " dims");
}

ChannelMagnitudeMap to_magnitudes(const TensorFile &f)
{
  if (f.kind != TensorFileKind::ChannelMagnitudes || f.dims.size() != 1)
    throw FormatError(std::string("expected a 1-D channel magnitude file, got ") + to_string(f.kind));
  for (float v : f.data)
    if (!(v >= 0.0f))
      throw FormatError("channel magnitudes must be nonnegative");
  return {f.data};
}

} // namespace fgmp
