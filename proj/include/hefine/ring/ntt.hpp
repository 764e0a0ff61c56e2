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

#include <cstddef>
#include <vector>

#include "hefine/ring/modulus.hpp"

namespace hefine::ring {

/// Twiddle tables for the negacyclic NTT of length n modulo one prime.
///
/// The forward transform takes coefficients in natural order and returns
/// evaluations in bit-reversed order: output[i] = p(psi^(2*bitrev(i)+1)),
/// where psi is the canonical primitive 2n-th root stored in `psi`.
struct NttTables {
  NttTables(const Modulus& modulus, std::size_t n);

  std::size_t n;
  int log_n;
  Modulus modulus;
  u64 psi;
  /// psi^bitrev(i) with Shoup companions; index 0 unused.
  std::vector<u64> forward, forward_shoup;
  /// psi^-bitrev(i) with Shoup companions; index 0 unused.
  std::vector<u64> inverse, inverse_shoup;
  u64 n_inverse, n_inverse_shoup;
};

/// Bit reversal of the low `bits` bits of v.
inline std::size_t bit_reverse(std::size_t v, int bits) noexcept {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

}  // namespace hefine::ring
