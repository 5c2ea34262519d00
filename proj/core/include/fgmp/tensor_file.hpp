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

#ifndef FGMP_TENSOR_FILE_HPP
#define FGMP_TENSOR_FILE_HPP

#include "fgmp/sensitivity.hpp"
#include "fgmp/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fgmp {

/*
 * .fgt layout (all integers little-endian):
 *
 *   offset  size        field
 *   0       4           magic "FGT1"
 *   4       1           dtype (0 = binary32)
 *   5       1           kind (TensorFileKind)
 *   6       1           ndim (>= 1)
 *   7       1           pad (0)
 *   8       8 * ndim    dims, u64 each
 *   ...     4 * prod    row-major binary32 payload
 *
 * Nothing may follow the payload.
 */

enum class TensorFileKind : std::uint8_t
{
  Tensor = 0,
  PerElementFisher = 1,
  PerChannelFisher = 2,
  ChannelMagnitudes = 3,
};

const char *to_string(TensorFileKind k) noexcept;

struct TensorFile
{
  TensorFileKind kind = TensorFileKind::Tensor;
  std::vector<std::uint64_t> dims;
  std::vector<float> data;

  friend bool operator==(const TensorFile &, const TensorFile &) = default;
};

std::vector<std::uint8_t> encode_fgt(const TensorFile &f);
/// Throws fgmp::FormatError on any layout violation.
TensorFile decode_fgt(std::span<const std::uint8_t> bytes);

TensorFile read_fgt(const std::filesystem::path &path);
void write_fgt(const std::filesystem::path &path, const TensorFile &f);

TensorFile to_file(const Tensor &t);
TensorFile to_file(const FisherMap &m);
TensorFile to_file(const ChannelMagnitudeMap &m);

/// 2-D tensor (a 1-D file becomes a single row). Requires kind Tensor.
Tensor to_tensor(const TensorFile &f, Role role, std::string layer = {});
/// Requires a per-element or per-channel Fisher kind.
FisherMap to_fisher(const TensorFile &f);
/// Requires kind ChannelMagnitudes.
ChannelMagnitudeMap to_magnitudes(const TensorFile &f);

/// Whole-file read; throws fgmp::Error naming the path on I/O failure.
std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path);
void write_bytes(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);

} // namespace fgmp

#endif // FGMP_TENSOR_FILE_HPP
