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

#ifndef FGMP_SRC_BYTE_IO_HPP
#define FGMP_SRC_BYTE_IO_HPP

#include "fgmp/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fgmp::detail {

class ByteWriter
{
public:
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v), 4); }

  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

private:
  void le(std::uint64_t v, int n)
  {
    for (int i = 0; i < n; ++i)
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class ByteReader
{
public:
  ByteReader(std::span<const std::uint8_t> in, const char *what) : in_(in), what_(what) {}

  std::span<const std::uint8_t> take(std::size_t n)
  {
    if (n > in_.size() - pos_)
      throw FormatError(std::string(what_) + ": truncated at byte " + std::to_string(pos_));
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint64_t u64() { return le(8); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(le(4))); }

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

  void expect_end() const
  {
    if (remaining() != 0)
      throw FormatError(std::string(what_) + ": " + std::to_string(remaining()) +
                        " trailing bytes after payload");
  }

private:
  std::uint64_t le(int n)
  {
    auto s = take(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(s[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  const char *what_;
};

/// a * b, or throws FormatError on overflow.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char *what)
{
  if (a != 0 && b > UINT64_MAX / a)
    throw FormatError(std::string(what) + ": size overflow");
  return a * b;
}

} // namespace fgmp::detail

#endif // FGMP_SRC_BYTE_IO_HPP
