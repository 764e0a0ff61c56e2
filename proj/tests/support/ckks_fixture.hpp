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

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "hefine/ckks/context.hpp"
#include "hefine/ckks/encoder.hpp"
#include "hefine/ckks/evaluator.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/params.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/ring/rns.hpp"

namespace hefine::testing {

/// Test-profile context with keys for a handful of rotation steps, built
/// once per process.
struct CkksFixture {
  ckks::ContextPtr ctx;
  ckks::KeyBundle keys;

  std::size_t slots() const { return ctx->slot_count(); }
  std::size_t top() const { return ctx->max_level(); }

  ckks::Ciphertext encrypt(std::span<const double> v, Prng& rng, std::size_t level = 0) const {
    const std::size_t l = level ? level : top();
    return ckks::encrypt_pk(*ctx, ckks::encode(*ctx, v, ctx->scale_at(l), l), keys.pk, rng);
  }
  std::vector<double> decrypt(const ckks::Ciphertext& ct) const {
    return ckks::decode(*ctx, ckks::decrypt(*ctx, ct, keys.sk));
  }
};

inline const std::vector<long>& fixture_rotation_steps() {
  static const std::vector<long> steps = {1, -1, 2, -2, 3, 4, -4, 8, 16};
  return steps;
}

inline const CkksFixture& ckks_fixture() {
  static const CkksFixture f = [] {
    CkksFixture out;
    out.ctx = ckks::Context::create(ckks::make_params(ckks::SecurityProfile::kTest));
    out.keys = ckks::keygen(*out.ctx, 2026, fixture_rotation_steps());
    return out;
  }();
  return f;
}

/// Same secret as ckks_fixture() with rotation keys for every power of two,
/// which covers the steps of any packing plan.
inline const CkksFixture& full_fixture() {
  static const CkksFixture f = [] {
    CkksFixture out;
    out.ctx = ckks_fixture().ctx;
    out.keys = ckks::keygen(*out.ctx, 2026);
    return out;
  }();
  return f;
}

/// Small insecure parameter set with `levels` base primes near 2^40; used
/// where the test profile's ring is too large for a brute-force oracle.
inline ckks::CkksParams small_params(std::size_t n, std::size_t levels) {
  ckks::CkksParams p;
  p.ring_degree = n;
  std::vector<ring::u64> used;
  used.push_back(ring::nearest_ntt_prime(std::ldexp(1.0, 59), n, used));
  for (std::size_t i = 1; i < levels; ++i) used.push_back(ring::nearest_ntt_prime(std::ldexp(1.0, 40), n, used));
  p.base_primes = used;
  p.special_primes = {ring::nearest_ntt_prime(std::ldexp(1.0, 60), n, used)};
  p.hamming_weight = n / 2;
  return p;
}

inline std::vector<double> uniform_vector(std::size_t n, Prng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform01();
  return v;
}

/// max_i |a_i - b_i| over the first min(|a|, |b|) entries.
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace hefine::testing
