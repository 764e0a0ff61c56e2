/*
 * Copyright 2026 The hefine Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>

namespace hefine::ring {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Largest supported modulus width. Keeps 4q below 2^63 so lazy NTT values
/// fit in a signed 64-bit lane for the SIMD compare instructions.
inline constexpr int kMaxModulusBits = 61;

/// A word-sized modulus with precomputed Barrett constants.
class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(u64 value);

  u64 value() const noexcept { return value_; }
  int bits() const noexcept { return bits_; }
  /// floor(2^128 / q) as {low word, high word}.
  const std::array<u64, 2>& barrett_ratio() const noexcept { return ratio_; }

  u64 reduce(u64 a) const noexcept { return a >= value_ ? a % value_ : a; }
  u64 reduce128(u128 x) const noexcept;
  u64 add(u64 a, u64 b) const noexcept {
    const u64 s = a + b;
    return s >= value_ ? s - value_ : s;
  }
  u64 sub(u64 a, u64 b) const noexcept { return a >= b ? a - b : a + value_ - b; }
  u64 neg(u64 a) const noexcept { return a == 0 ? 0 : value_ - a; }
  u64 mul(u64 a, u64 b) const noexcept { return reduce128(static_cast<u128>(a) * b); }
  u64 pow(u64 base, u64 exponent) const noexcept;
  /// Inverse modulo a prime modulus (Fermat); a must be nonzero mod q.
  u64 inverse(u64 a) const;
  /// Reduces a signed integer into [0, q).
  u64 from_signed(std::int64_t v) const noexcept {
    const std::int64_t q = static_cast<std::int64_t>(value_);
    std::int64_t r = v % q;
    if (r < 0) r += q;
    return static_cast<u64>(r);
  }

  /// Shoup companion floor(w * 2^64 / q) for a fixed multiplicand w < q.
  u64 shoup(u64 w) const noexcept {
    return static_cast<u64>((static_cast<u128>(w) << 64) / value_);
  }

  friend bool operator==(const Modulus& a, const Modulus& b) noexcept {
    return a.value_ == b.value_;
  }

 private:
  u64 value_ = 0;
  int bits_ = 0;
  std::array<u64, 2> ratio_{};
};

/// w*x mod q in [0, 2q) given the Shoup companion of w; x may be any word.
inline u64 mul_shoup_lazy(u64 x, u64 w, u64 w_shoup, u64 q) noexcept {
  const u64 hi = static_cast<u64>((static_cast<u128>(x) * w_shoup) >> 64);
  return x * w - hi * q;
}

inline u64 mul_shoup(u64 x, u64 w, u64 w_shoup, u64 q) noexcept {
  const u64 r = mul_shoup_lazy(x, w, w_shoup, q);
  return r >= q ? r - q : r;
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

/// Smallest generator-derived primitive 2n-th root of unity modulo prime q.
/// Requires q = 1 (mod 2n).
u64 find_primitive_root(u64 q, u64 two_n);

}  // namespace hefine::ring
