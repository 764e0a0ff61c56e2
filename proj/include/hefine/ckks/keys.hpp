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
#include <map>
#include <span>
#include <vector>

#include "hefine/ckks/context.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/ring/ring_poly.hpp"

namespace hefine::ckks {

/// Ternary secret s over the full extended basis (base + special primes).
/// Hospital-side only; cloud code never receives one.
struct SecretKey {
  ring::RingPoly s;  // NTT form
  std::uint64_t params_hash = 0;
};

/// (b, a) = (-a*s + e, a) over the base primes at the top level.
struct PublicKey {
  ring::RingPoly b, a;  // NTT form
  std::uint64_t params_hash = 0;
};

/// Hybrid key-switching key from some s' to s. Digit j covers base primes
/// [j*alpha, (j+1)*alpha); each digit holds
///   b_j = -a_j*s + e_j + P*[j-th CRT idempotent]*s',   a_j uniform,
/// over the full extended basis. Lower levels use a prefix of the residues.
struct SwitchingKey {
  std::vector<ring::RingPoly> b, a;  // NTT form, one entry per digit
};

/// Relinearization key: switches s^2 to s.
struct EvaluationKey {
  SwitchingKey key;
  std::uint64_t params_hash = 0;
};

/// Rotation keys indexed by slot step, normalised to (-slots/2, slots/2].
struct RotationKeySet {
  std::map<long, SwitchingKey> keys;
  std::uint64_t params_hash = 0;

  bool has(long step) const { return keys.count(step) != 0; }
  std::vector<long> steps() const;
};

struct KeyBundle {
  SecretKey sk;
  PublicKey pk;
  EvaluationKey evk;
  RotationKeySet rotations;
};

/// Normalises a rotation step to (-slots/2, slots/2].
long normalize_step(long step, std::size_t slots);
/// +-2^i for every 2^i <= slots/2, deduplicated after normalisation.
std::vector<long> power_of_two_steps(std::size_t slots);

SecretKey generate_secret_key(const Context& ctx, Prng& rng);
PublicKey generate_public_key(const Context& ctx, const SecretKey& sk, Prng& rng);
EvaluationKey generate_evaluation_key(const Context& ctx, const SecretKey& sk, Prng& rng);
RotationKeySet generate_rotation_keys(const Context& ctx, const SecretKey& sk,
                                      std::span<const long> steps, Prng& rng);

/// Full key generation from a seed. `steps` defaults to power_of_two_steps.
/// Each key is drawn from its own forked stream, so requesting a different
/// step set does not change the secret, public or evaluation key.
KeyBundle keygen(const Context& ctx, std::uint64_t seed);
KeyBundle keygen(const Context& ctx, std::uint64_t seed, std::span<const long> steps);

}  // namespace hefine::ckks
