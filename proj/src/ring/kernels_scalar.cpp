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

#include "hefine/ring/kernels.hpp"

namespace hefine::ring {
namespace scalar {

void add(const u64* a, const u64* b, u64* out, std::size_t n, u64 q) {
  for (std::size_t i = 0; i < n; ++i) {
    const u64 s = a[i] + b[i];
    out[i] = s >= q ? s - q : s;
  }
}

void sub(const u64* a, const u64* b, u64* out, std::size_t n, u64 q) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + q - b[i];
  }
}

void neg(const u64* a, u64* out, std::size_t n, u64 q) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] == 0 ? 0 : q - a[i];
}

void mul(const u64* a, const u64* b, u64* out, std::size_t n, const Modulus& q) {
  for (std::size_t i = 0; i < n; ++i) out[i] = q.mul(a[i], b[i]);
}

void mul_add(const u64* a, const u64* b, u64* acc, std::size_t n, const Modulus& q) {
  const u64 v = q.value();
  for (std::size_t i = 0; i < n; ++i) {
    const u64 s = acc[i] + q.mul(a[i], b[i]);
    acc[i] = s >= v ? s - v : s;
  }
}

void mul_scalar(const u64* a, u64 w, u64 w_shoup, u64* out, std::size_t n, u64 q) {
  for (std::size_t i = 0; i < n; ++i) out[i] = mul_shoup(a[i], w, w_shoup, q);
}

// Harvey-style lazy butterflies: values stay below 4q between stages and are
// fully reduced once at the end.
void ntt_forward(u64* a, const NttTables& t) {
  const std::size_t n = t.n;
  const u64 q = t.modulus.value();
  const u64 two_q = 2 * q;
  std::size_t gap = n;
  for (std::size_t m = 1; m < n; m <<= 1) {
    gap >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const u64 w = t.forward[m + i];
      const u64 ws = t.forward_shoup[m + i];
      u64* x = a + 2 * i * gap;
      u64* y = x + gap;
      for (std::size_t j = 0; j < gap; ++j) {
        u64 u = x[j];
        if (u >= two_q) u -= two_q;
        const u64 v = mul_shoup_lazy(y[j], w, ws, q);
        x[j] = u + v;
        y[j] = u - v + two_q;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    u64 v = a[i];
    if (v >= two_q) v -= two_q;
    if (v >= q) v -= q;
    a[i] = v;
  }
}

void ntt_inverse(u64* a, const NttTables& t) {
  const std::size_t n = t.n;
  const u64 q = t.modulus.value();
  const u64 two_q = 2 * q;
  std::size_t gap = 1;
  for (std::size_t m = n >> 1; m >= 1; m >>= 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const u64 w = t.inverse[m + i];
      const u64 ws = t.inverse_shoup[m + i];
      u64* x = a + 2 * i * gap;
      u64* y = x + gap;
      for (std::size_t j = 0; j < gap; ++j) {
        const u64 u = x[j];
        const u64 v = y[j];
        u64 s = u + v;
        if (s >= two_q) s -= two_q;
        x[j] = s;
        y[j] = mul_shoup_lazy(u - v + two_q, w, ws, q);
      }
    }
    gap <<= 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = mul_shoup(a[i], t.n_inverse, t.n_inverse_shoup, q);
  }
}

}  // namespace scalar

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar",          scalar::add,        scalar::sub,
                         scalar::neg,       scalar::mul,        scalar::mul_add,
                         scalar::mul_scalar, scalar::ntt_forward, scalar::ntt_inverse};
  return k;
}

}  // namespace hefine::ring
