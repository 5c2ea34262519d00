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

#ifndef FGMP_NUMERICS_HPP
#define FGMP_NUMERICS_HPP

#include <cstdint>

namespace fgmp {

/// 4-bit E2M1 element code: bit 3 sign, bits 2..1 exponent (bias 1), bit 0 mantissa.
struct Fp4Code
{
  std::uint8_t bits = 0;

  friend constexpr bool operator==(Fp4Code, Fp4Code) = default;
};

/// 8-bit E4M3 code (bias 7, no infinities, 0x7F/0xFF are NaN, max finite 448).
struct Fp8Code
{
  std::uint8_t bits = 0;

  friend constexpr bool operator==(Fp8Code, Fp8Code) = default;
};

inline constexpr float kFp4Max = 6.0f;
inline constexpr float kFp8Max = 448.0f;

inline constexpr Fp4Code kFp4PositiveZero{0x0};
inline constexpr Fp4Code kFp4NegativeZero{0x8};
inline constexpr Fp8Code kFp8One{0x38};
inline constexpr Fp8Code kFp8MaxFinite{0x7E};
inline constexpr Fp8Code kFp8MinPositive{0x01};

float decode_fp4(Fp4Code c) noexcept;
float decode_fp8(Fp8Code c) noexcept;

/// Round-to-nearest-even, saturating at +-6. Throws fgmp::Error on NaN/inf.
Fp4Code encode_fp4(float v);

/// Round-to-nearest-even, saturating at +-448; never yields a NaN code.
/// Throws fgmp::Error on NaN/inf.
Fp8Code encode_fp8(float v);

constexpr bool is_nan(Fp8Code c) noexcept { return (c.bits & 0x7F) == 0x7F; }

} // namespace fgmp

#endif // FGMP_NUMERICS_HPP
