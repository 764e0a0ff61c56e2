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

#include "hefine/ring/ntt.hpp"

#include <bit>

#include "hefine/common/error.hpp"

namespace hefine::ring {

NttTables::NttTables(const Modulus& mod, std::size_t size)
    : n(size), log_n(std::countr_zero(size)), modulus(mod) {
  if (size < 2 || !std::has_single_bit(size)) {
    throw InvalidArgument("NTT length must be a power of two >= 2");
  }
  const u64 q = mod.value();
  psi = find_primitive_root(q, 2 * n);
  const u64 psi_inv = mod.inverse(psi);

  forward.assign(n, 0);
  forward_shoup.assign(n, 0);
  inverse.assign(n, 0);
  inverse_shoup.assign(n, 0);
  u64 power = 1;
  u64 inv_power = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = bit_reverse(i, log_n);
    forward[slot] = power;
    inverse[slot] = inv_power;
    power = mod.mul(power, psi);
    inv_power = mod.mul(inv_power, psi_inv);
  }
  for (std::size_t i = 0; i < n; ++i) {
    forward_shoup[i] = mod.shoup(forward[i]);
    inverse_shoup[i] = mod.shoup(inverse[i]);
  }
  n_inverse = mod.inverse(static_cast<u64>(n) % q);
  n_inverse_shoup = mod.shoup(n_inverse);
}

}  // namespace hefine::ring
