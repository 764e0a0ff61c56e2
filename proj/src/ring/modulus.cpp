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

#include "hefine/ring/modulus.hpp"

#include <bit>
#include <vector>

#include "hefine/common/error.hpp"

namespace hefine::ring {

Modulus::Modulus(u64 value) : value_(value) {
  if (value < 2) throw InvalidArgument("modulus must be at least 2");
  bits_ = 64 - std::countl_zero(value);
  if (bits_ > kMaxModulusBits) {
    throw InvalidArgument("modulus wider than " + std::to_string(kMaxModulusBits) + " bits");
  }
  // floor(2^128 / q) via long division by q of (2^128 - 1), corrected for the
  // case where q divides 2^128 (only powers of two).
  const u128 all_ones = ~static_cast<u128>(0);
  u128 quotient = all_ones / value;
  if (all_ones % value == value - 1) quotient += 1;
  ratio_ = {static_cast<u64>(quotient), static_cast<u64>(quotient >> 64)};
}

u64 Modulus::reduce128(u128 x) const noexcept {
  const u64 x0 = static_cast<u64>(x);
  const u64 x1 = static_cast<u64>(x >> 64);
  // floor(x * ratio / 2^128) computed from the three significant partial
  // products; the estimate is short by at most two multiples of q.
  const u64 carry = static_cast<u64>((static_cast<u128>(x0) * ratio_[0]) >> 64);
  const u128 p01 = static_cast<u128>(x0) * ratio_[1];
  const u128 mid = p01 + carry;
  const u128 p10 = static_cast<u128>(x1) * ratio_[0];
  const u128 mid2 = static_cast<u128>(static_cast<u64>(mid)) + static_cast<u64>(p10);
  const u64 estimate = x1 * ratio_[1] + static_cast<u64>(mid >> 64) +
                       static_cast<u64>(p10 >> 64) + static_cast<u64>(mid2 >> 64);
  u64 r = x0 - estimate * value_;
  if (r >= value_) r -= value_;
  return r >= value_ ? r - value_ : r;
}

u64 Modulus::pow(u64 base, u64 exponent) const noexcept {
  u64 result = 1 % value_;
  base = reduce(base);
  while (exponent) {
    if (exponent & 1) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return result;
}

u64 Modulus::inverse(u64 a) const {
  a = reduce(a);
  if (a == 0) throw InvalidArgument("inverse of zero");
  return pow(a, value_ - 2);
}

namespace {

u64 mulmod_any(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod_any(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_any(r, b, m);
    b = mulmod_any(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod_any(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_any(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 find_primitive_root(u64 q, u64 two_n) {
  if (two_n == 0 || (q - 1) % two_n != 0) {
    throw InvalidArgument("modulus is not 1 mod 2N");
  }
  // Factor q-1 to test generators.
  std::vector<u64> factors;
  u64 m = q - 1;
  for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p == 0) {
      factors.push_back(p);
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) factors.push_back(m);
  const Modulus mod(q);
  for (u64 g = 2; g < q; ++g) {
    bool generator = true;
    for (u64 f : factors) {
      if (mod.pow(g, (q - 1) / f) == 1) {
        generator = false;
        break;
      }
    }
    if (!generator) continue;
    const u64 root = mod.pow(g, (q - 1) / two_n);
    // Canonicalise: smallest odd power of root, so the table is independent of g.
    u64 best = root;
    const u64 root_sq = mod.mul(root, root);
    u64 cur = root;
    for (u64 k = 1; k < two_n; k += 2) {
      if (cur < best) best = cur;
      cur = mod.mul(cur, root_sq);
    }
    return best;
  }
  throw InvalidArgument("no primitive root found");
}

}  // namespace hefine::ring
