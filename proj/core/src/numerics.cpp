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

#include "fgmp/numerics.hpp"

#include "fgmp/error.hpp"

#include <cmath>
#include <limits>

namespace fgmp {

namespace {

/// Layout of a sign/exponent/mantissa minifloat with IEEE-style subnormals.
struct MiniFloat
{
  int exponent_bits;
  int mantissa_bits;
  int bias;
  // Largest finite magnitude, expressed as (exponent field, mantissa field).
  int max_exponent_field;
  int max_mantissa_field;
};

constexpr MiniFloat kE2M1{2, 1, 1, 3, 1};
constexpr MiniFloat kE4M3{4, 3, 7, 15, 6};

double decode_magnitude(const MiniFloat &fmt, unsigned exp_field, unsigned mant_field)
{
  const double mant_scale = std::ldexp(1.0, -fmt.mantissa_bits);
  if (exp_field == 0)
    return std::ldexp(mant_field * mant_scale, 1 - fmt.bias);
  return std::ldexp(1.0 + mant_field * mant_scale, static_cast<int>(exp_field) - fmt.bias);
}

/// Returns sign-less code bits (exponent << mantissa_bits | mantissa).
unsigned encode_magnitude(const MiniFloat &fmt, double mag)
{
  const unsigned max_code =
    (static_cast<unsigned>(fmt.max_exponent_field) << fmt.mantissa_bits) | fmt.max_mantissa_field;
  const double max_value = decode_magnitude(fmt, fmt.max_exponent_field, fmt.max_mantissa_field);
  if (mag >= max_value)
    return max_code;
  if (mag == 0.0)
    return 0;

  const int min_exponent = 1 - fmt.bias;
  int exponent = std::ilogb(mag);
  if (exponent < min_exponent)
    exponent = min_exponent;

  // mag / quantum is exact (power-of-two scaling); nearbyint rounds half to even
  // under the default rounding mode, and the integer parity is the mantissa LSB.
  const double quantum = std::ldexp(1.0, exponent - fmt.mantissa_bits);
  auto significand = static_cast<unsigned>(std::nearbyint(mag / quantum));
  const unsigned implicit_one = 1u << fmt.mantissa_bits;
  if (significand == 2 * implicit_one)
  {
    significand = implicit_one;
    ++exponent;
  }

  unsigned code;
  if (significand < implicit_one)
    code = significand; // subnormal, exponent field 0
  else
    code = (static_cast<unsigned>(exponent + fmt.bias) << fmt.mantissa_bits) |
           (significand - implicit_one);
  return code > max_code ? max_code : code;
}

void require_finite(float v, const char *what)
{
  if (!std::isfinite(v))
    throw Error(std::string(what) + ": non-finite input");
}

} // namespace

float decode_fp4(Fp4Code c) noexcept
{
  const unsigned exp_field = (c.bits >> 1) & 0x3;
  const unsigned mant_field = c.bits & 0x1;
  const auto mag = static_cast<float>(decode_magnitude(kE2M1, exp_field, mant_field));
  return (c.bits & 0x8) ? -mag : mag;
}

float decode_fp8(Fp8Code c) noexcept
{
  if (is_nan(c))
    return std::numeric_limits<float>::quiet_NaN();
  const unsigned exp_field = (c.bits >> 3) & 0xF;
  const unsigned mant_field = c.bits & 0x7;
  const auto mag = static_cast<float>(decode_magnitude(kE4M3, exp_field, mant_field));
  return (c.bits & 0x80) ? -mag : mag;
}

Fp4Code encode_fp4(float v)
{
  require_finite(v, "encode_fp4");
  const unsigned sign = std::signbit(v) ? 0x8u : 0x0u;
  const unsigned mag = encode_magnitude(kE2M1, std::fabs(static_cast<double>(v)));
  return Fp4Code{static_cast<std::uint8_t>(sign | mag)};
}

Fp8Code encode_fp8(float v)
{
  require_finite(v, "encode_fp8");
  const unsigned sign = std::signbit(v) ? 0x80u : 0x0u;
  const unsigned mag = encode_magnitude(kE4M3, std::fabs(static_cast<double>(v)));
  return Fp8Code{static_cast<std::uint8_t>(sign | mag)};
}

} // namespace fgmp
