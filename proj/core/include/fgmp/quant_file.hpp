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

#ifndef FGMP_QUANT_FILE_HPP
#define FGMP_QUANT_FILE_HPP

#include "fgmp/blockquant.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fgmp {

/*
 * .fgq layout (all integers little-endian):
 *
 *   0    4    magic "FGQ1"
 *   4    2    block size, u16 (must be 16)
 *   6    8    rows, u64
 *   14   8    cols, u64
 *   22   4    FP8 tensor scale, binary32
 *   26   B    metadata bitmap, B = ceil(blocks / 8); bit i (LSB-first) is
 *             block i's precision, 1 = FP8; padding bits are zero
 *   ...       block payloads in block order:
 *               NVFP4: 8 bytes of packed codes (low nibble = even element)
 *                      followed by the E4M3 scale code
 *               FP8:   16 code bytes
 *
 * The file ends exactly after the last block.
 */

inline constexpr std::size_t kFgqHeaderBytes = 26;

std::vector<std::uint8_t> encode_fgq(const QuantizedTensor &qt);
/// Throws fgmp::FormatError on any layout violation.
QuantizedTensor decode_fgq(std::span<const std::uint8_t> bytes);

QuantizedTensor read_fgq(const std::filesystem::path &path);
void write_fgq(const std::filesystem::path &path, const QuantizedTensor &qt);

} // namespace fgmp

#endif // FGMP_QUANT_FILE_HPP
