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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/common/prng.hpp"

namespace hefine::ckks {

// Homomorphic operations. All functions are pure: inputs are never modified
// and randomness comes only from the Prng argument. Scale and level rules:
//   * add/sub need equal levels and bit-identical scales (ScaleMismatch),
//   * products multiply scales and leave rescaling to the caller,
//   * rescale divides the scale by the dropped prime exactly.
// Canonical scales (Context::scale_at) are closed under mult + rescale, so a
// computation that keeps operands at canonical scales never needs coercion.

Ciphertext encrypt_pk(const Context& ctx, const Plaintext& pt, const PublicKey& pk, Prng& rng);
/// Symmetric encryption; used by the key holder to refresh ciphertexts.
Ciphertext encrypt_sk(const Context& ctx, const Plaintext& pt, const SecretKey& sk, Prng& rng);
/// c0 + c1*s at the ciphertext's level and scale. Rejects 3-poly input.
Plaintext decrypt(const Context& ctx, const Ciphertext& ct, const SecretKey& sk);

Ciphertext add_ct(const Ciphertext& a, const Ciphertext& b);
Ciphertext sub_ct(const Ciphertext& a, const Ciphertext& b);
Ciphertext negate(const Ciphertext& a);
Ciphertext add_plain(const Ciphertext& a, const Plaintext& p);
Ciphertext sub_plain(const Ciphertext& a, const Plaintext& p);
/// Adds `value` to every slot (constant encoded at the ciphertext's scale).
Ciphertext add_const(const Ciphertext& a, double value);

/// Tensor product; 3 polynomials, scale a.scale * b.scale.
Ciphertext tensor(const Context& ctx, const Ciphertext& a, const Ciphertext& b);
Ciphertext relinearize(const Context& ctx, const Ciphertext& ct, const EvaluationKey& evk);
/// tensor + relinearize.
Ciphertext mult_ct(const Context& ctx, const Ciphertext& a, const Ciphertext& b,
                   const EvaluationKey& evk);
Ciphertext square(const Context& ctx, const Ciphertext& a, const EvaluationKey& evk);
Ciphertext mult_plain(const Context& ctx, const Ciphertext& a, const Plaintext& p);
/// Multiplies every slot by `value` encoded at the canonical scale of the
/// ciphertext's level; the scale grows by that factor (rescale afterwards).
Ciphertext mult_const(const Context& ctx, const Ciphertext& a, double value);
/// Exact multiplication by a small integer; scale unchanged.
Ciphertext mult_int(const Ciphertext& a, std::int64_t k);

/// Divides by the last prime of the level; scale /= q_last.
Ciphertext rescale(const Context& ctx, const Ciphertext& a);
/// Drops trailing primes without dividing (scale unchanged).
Ciphertext drop_levels(const Ciphertext& a, std::size_t level);
/// Brings `a` to `level` at the canonical scale S(level) by multiplying
/// with the constant 1 at a compensating scale and rescaling. Consumes at
/// least one level (a.level() > level) unless `a` is already canonical there.
Ciphertext adjust_scale(const Context& ctx, const Ciphertext& a, std::size_t level);

/// value * a, landing at `level` (< a.level()) with the canonical scale
/// S(level): one integer multiply and one rescale after dropping primes.
/// Also the way to bring a ciphertext down to a lower level (value = 1).
Ciphertext mult_const_to(const Context& ctx, const Ciphertext& a, double value, std::size_t level);
/// Slot-wise product with `values`, landing at `level` (< a.level()) with
/// the canonical scale S(level). The plaintext is encoded at the scale that
/// makes the rescaled result canonical.
Ciphertext mult_plain_to(const Context& ctx, const Ciphertext& a, std::span<const double> values,
                         std::size_t level);
/// `a` at `level` <= a.level() and canonical scale; identity when a is
/// already there.
Ciphertext bring_to(const Context& ctx, const Ciphertext& a, std::size_t level);

/// Left rotation: output slot i = input slot (i + step) mod slots. Steps
/// without a dedicated key are decomposed into signed powers of two.
Ciphertext rotate(const Context& ctx, const Ciphertext& a, long step, const RotationKeySet& keys);
/// The key steps rotate() would apply for `step` (empty for step 0).
std::vector<long> rotation_plan(long step, std::size_t slots, const RotationKeySet* keys = nullptr);

/// Hybrid key switching of d (NTT form, level l) under `key`; returns the
/// pair (k0, k1) with k0 + k1*s ~ d*s'.
std::pair<ring::RingPoly, ring::RingPoly> key_switch(const Context& ctx, const ring::RingPoly& d,
                                                     const SwitchingKey& key);

/// Records the key steps of every rotation performed on this thread while
/// alive. Used by tests to check rotations stay within a declared set.
class RotationLog {
 public:
  RotationLog();
  ~RotationLog();
  RotationLog(const RotationLog&) = delete;
  RotationLog& operator=(const RotationLog&) = delete;
  const std::vector<long>& steps() const noexcept { return steps_; }
  void record(long step) { steps_.push_back(step); }

 private:
  std::vector<long> steps_;
  RotationLog* previous_;
};

}  // namespace hefine::ckks
