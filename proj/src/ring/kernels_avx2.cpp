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

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define HEFINE_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace hefine::ring {

#if HEFINE_HAVE_AVX2_KERNELS

// Functions carry a target attribute instead of compiling the whole file with
// -mavx2, so inline helpers pulled in from headers stay baseline code.
#define HEFINE_AVX2 __attribute__((target("avx2")))

namespace avx2 {
namespace {

using v4 = __m256i;

HEFINE_AVX2 inline v4 load(const u64* p) { return _mm256_loadu_si256(reinterpret_cast<const v4*>(p)); }
HEFINE_AVX2 inline void store(u64* p, v4 v) { _mm256_storeu_si256(reinterpret_cast<v4*>(p), v); }
HEFINE_AVX2 inline v4 splat(u64 v) { return _mm256_set1_epi64x(static_cast<long long>(v)); }

// Low 64 bits of the lane-wise 64x64 product.
HEFINE_AVX2 inline v4 mul_lo(v4 a, v4 b) {
  const v4 a_hi = _mm256_srli_epi64(a, 32);
  const v4 b_hi = _mm256_srli_epi64(b, 32);
  const v4 cross = _mm256_add_epi64(_mm256_mul_epu32(a_hi, b), _mm256_mul_epu32(a, b_hi));
  return _mm256_add_epi64(_mm256_mul_epu32(a, b), _mm256_slli_epi64(cross, 32));
}

// High 64 bits of the lane-wise 64x64 product.
HEFINE_AVX2 inline v4 mul_hi(v4 a, v4 b) {
  const v4 mask32 = splat(0xffffffffULL);
  const v4 a_hi = _mm256_srli_epi64(a, 32);
  const v4 b_hi = _mm256_srli_epi64(b, 32);
  const v4 ll = _mm256_mul_epu32(a, b);
  const v4 lh = _mm256_mul_epu32(a, b_hi);
  const v4 hl = _mm256_mul_epu32(a_hi, b);
  const v4 hh = _mm256_mul_epu32(a_hi, b_hi);
  const v4 mid = _mm256_add_epi64(
      _mm256_srli_epi64(ll, 32),
      _mm256_add_epi64(_mm256_and_si256(lh, mask32), _mm256_and_si256(hl, mask32)));
  return _mm256_add_epi64(
      hh, _mm256_add_epi64(_mm256_add_epi64(_mm256_srli_epi64(lh, 32), _mm256_srli_epi64(hl, 32)),
                           _mm256_srli_epi64(mid, 32)));
}

// All-ones where a < b, treating lanes as unsigned 64-bit.
HEFINE_AVX2 inline v4 less_unsigned(v4 a, v4 b) {
  const v4 sign = splat(0x8000000000000000ULL);
  return _mm256_cmpgt_epi64(_mm256_xor_si256(b, sign), _mm256_xor_si256(a, sign));
}

// a - bound if a >= bound; valid while both are below 2^63.
HEFINE_AVX2 inline v4 reduce_once(v4 a, v4 bound) {
  const v4 below = _mm256_cmpgt_epi64(bound, a);
  return _mm256_sub_epi64(a, _mm256_andnot_si256(below, bound));
}

HEFINE_AVX2 inline v4 mul_shoup_lazy(v4 x, v4 w, v4 ws, v4 q) {
  const v4 hi = mul_hi(x, ws);
  return _mm256_sub_epi64(mul_lo(x, w), mul_lo(hi, q));
}

// Lane-wise Barrett reduction of a*b, mirroring Modulus::reduce128.
HEFINE_AVX2 inline v4 mul_mod(v4 a, v4 b, v4 q, v4 r0, v4 r1) {
  const v4 x0 = mul_lo(a, b);
  const v4 x1 = mul_hi(a, b);
  const v4 carry = mul_hi(x0, r0);
  const v4 p01_lo = mul_lo(x0, r1);
  const v4 p01_hi = mul_hi(x0, r1);
  const v4 mid_lo = _mm256_add_epi64(p01_lo, carry);
  // Adding an all-ones mask subtracts -1, i.e. propagates the carry.
  const v4 mid_hi = _mm256_sub_epi64(p01_hi, less_unsigned(mid_lo, carry));
  const v4 p10_lo = mul_lo(x1, r0);
  const v4 p10_hi = mul_hi(x1, r0);
  const v4 sum = _mm256_add_epi64(mid_lo, p10_lo);
  const v4 c2 = less_unsigned(sum, mid_lo);
  v4 estimate = _mm256_add_epi64(mul_lo(x1, r1), _mm256_add_epi64(mid_hi, p10_hi));
  estimate = _mm256_sub_epi64(estimate, c2);
  v4 r = _mm256_sub_epi64(x0, mul_lo(estimate, q));
  r = reduce_once(r, q);
  return reduce_once(r, q);
}

HEFINE_AVX2 void add(const u64* a, const u64* b, u64* out, std::size_t n, u64 q) {
  const v4 vq = splat(q);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    store(out + i, reduce_once(_mm256_add_epi64(load(a + i), load(b + i)), vq));
  }
  for (; i < n; ++i) {
    const u64 s = a[i] + b[i];
    out[i] = s >= q ? s - q : s;
  }
}

HEFINE_AVX2 void sub(const u64* a, const u64* b, u64* out, std::size_t n, u64 q) {
  const v4 vq = splat(q);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const v4 d = _mm256_sub_epi64(_mm256_add_epi64(load(a + i), vq), load(b + i));
    store(out + i, reduce_once(d, vq));
  }
  for (; i < n; ++i) out[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + q - b[i];
}

HEFINE_AVX2 void neg(const u64* a, u64* out, std::size_t n, u64 q) {
  const v4 vq = splat(q);
  const v4 zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const v4 x = load(a + i);
    const v4 is_zero = _mm256_cmpeq_epi64(x, zero);
    store(out + i, _mm256_andnot_si256(is_zero, _mm256_sub_epi64(vq, x)));
  }
  for (; i < n; ++i) out[i] = a[i] == 0 ? 0 : q - a[i];
}

HEFINE_AVX2 void mul(const u64* a, const u64* b, u64* out, std::size_t n, const Modulus& m) {
  const v4 vq = splat(m.value());
  const v4 r0 = splat(m.barrett_ratio()[0]);
  const v4 r1 = splat(m.barrett_ratio()[1]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(out + i, mul_mod(load(a + i), load(b + i), vq, r0, r1));
  for (; i < n; ++i) out[i] = m.mul(a[i], b[i]);
}

HEFINE_AVX2 void mul_add(const u64* a, const u64* b, u64* acc, std::size_t n, const Modulus& m) {
  const u64 q = m.value();
  const v4 vq = splat(q);
  const v4 r0 = splat(m.barrett_ratio()[0]);
  const v4 r1 = splat(m.barrett_ratio()[1]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const v4 p = mul_mod(load(a + i), load(b + i), vq, r0, r1);
    store(acc + i, reduce_once(_mm256_add_epi64(load(acc + i), p), vq));
  }
  for (; i < n; ++i) {
    const u64 s = acc[i] + m.mul(a[i], b[i]);
    acc[i] = s >= q ? s - q : s;
  }
}

HEFINE_AVX2 void mul_scalar(const u64* a, u64 w, u64 w_shoup, u64* out, std::size_t n, u64 q) {
  const v4 vq = splat(q);
  const v4 vw = splat(w);
  const v4 vws = splat(w_shoup);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    store(out + i, reduce_once(mul_shoup_lazy(load(a + i), vw, vws, vq), vq));
  }
  for (; i < n; ++i) out[i] = ring::mul_shoup(a[i], w, w_shoup, q);
}

HEFINE_AVX2 void ntt_forward(u64* a, const NttTables& t) {
  const std::size_t n = t.n;
  const u64 q = t.modulus.value();
  const u64 two_q = 2 * q;
  const v4 vq = splat(q);
  const v4 v2q = splat(two_q);
  std::size_t gap = n;
  for (std::size_t m = 1; m < n; m <<= 1) {
    gap >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const u64 w = t.forward[m + i];
      const u64 ws = t.forward_shoup[m + i];
      u64* x = a + 2 * i * gap;
      u64* y = x + gap;
      if (gap >= 4) {
        const v4 vw = splat(w);
        const v4 vws = splat(ws);
        for (std::size_t j = 0; j < gap; j += 4) {
          const v4 u = reduce_once(load(x + j), v2q);
          const v4 v = mul_shoup_lazy(load(y + j), vw, vws, vq);
          store(x + j, _mm256_add_epi64(u, v));
          store(y + j, _mm256_add_epi64(_mm256_sub_epi64(u, v), v2q));
        }
      } else {
        for (std::size_t j = 0; j < gap; ++j) {
          u64 u = x[j];
          if (u >= two_q) u -= two_q;
          const u64 v = ring::mul_shoup_lazy(y[j], w, ws, q);
          x[j] = u + v;
          y[j] = u - v + two_q;
        }
      }
    }
  }
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(a + i, reduce_once(reduce_once(load(a + i), v2q), vq));
  for (; i < n; ++i) {
    u64 v = a[i];
    if (v >= two_q) v -= two_q;
    if (v >= q) v -= q;
    a[i] = v;
  }
}

HEFINE_AVX2 void ntt_inverse(u64* a, const NttTables& t) {
  const std::size_t n = t.n;
  const u64 q = t.modulus.value();
  const u64 two_q = 2 * q;
  const v4 vq = splat(q);
  const v4 v2q = splat(two_q);
  std::size_t gap = 1;
  for (std::size_t m = n >> 1; m >= 1; m >>= 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const u64 w = t.inverse[m + i];
      const u64 ws = t.inverse_shoup[m + i];
      u64* x = a + 2 * i * gap;
      u64* y = x + gap;
      if (gap >= 4) {
        const v4 vw = splat(w);
        const v4 vws = splat(ws);
        for (std::size_t j = 0; j < gap; j += 4) {
          const v4 u = load(x + j);
          const v4 v = load(y + j);
          store(x + j, reduce_once(_mm256_add_epi64(u, v), v2q));
          const v4 d = _mm256_add_epi64(_mm256_sub_epi64(u, v), v2q);
          store(y + j, mul_shoup_lazy(d, vw, vws, vq));
        }
      } else {
        for (std::size_t j = 0; j < gap; ++j) {
          const u64 u = x[j];
          const u64 v = y[j];
          u64 s = u + v;
          if (s >= two_q) s -= two_q;
          x[j] = s;
          y[j] = ring::mul_shoup_lazy(u - v + two_q, w, ws, q);
        }
      }
    }
    gap <<= 1;
  }
  const v4 vn = splat(t.n_inverse);
  const v4 vns = splat(t.n_inverse_shoup);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(a + i, reduce_once(mul_shoup_lazy(load(a + i), vn, vns, vq), vq));
  for (; i < n; ++i) a[i] = ring::mul_shoup(a[i], t.n_inverse, t.n_inverse_shoup, q);
}

}  // namespace
}  // namespace avx2

const Kernels* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  static const Kernels k{"avx2",          avx2::add,        avx2::sub,
                         avx2::neg,       avx2::mul,        avx2::mul_add,
                         avx2::mul_scalar, avx2::ntt_forward, avx2::ntt_inverse};
  return supported ? &k : nullptr;
}

#else

const Kernels* avx2_kernels() { return nullptr; }

#endif

}  // namespace hefine::ring
