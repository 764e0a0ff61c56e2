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

#include "hefine/ckks/keys.hpp"

#include <algorithm>

#include "hefine/common/error.hpp"
#include "hefine/ring/kernels.hpp"
#include "hefine/ring/sampling.hpp"

namespace hefine::ckks {

using ring::Domain;
using ring::RingPoly;

namespace {

/// Key switching from `target` (s', NTT, extended full level) to sk.
SwitchingKey make_switching_key(const Context& ctx, const SecretKey& sk, const RingPoly& target,
                                Prng& rng) {
  const std::size_t L = ctx.max_level();
  const std::size_t alpha = ctx.digit_size();
  const std::size_t n = ctx.degree();
  const auto p_mod_q = ctx.special_product_mod_base();
  const ring::Kernels& kern = ring::kernels();
  SwitchingKey key;
  for (std::size_t j = 0; j < ctx.digit_count(L); ++j) {
    RingPoly a = ring::sample_uniform(ctx.basis(), L, rng, Domain::kNtt, true);
    RingPoly e = ring::sample_gaussian(ctx.basis(), L, ctx.params().sigma, rng, true);
    ring::ntt_forward_inplace(e);
    RingPoly b = ring::poly_sub(e, ring::poly_mul(a, sk.s));
    for (std::size_t i = j * alpha; i < std::min(L, (j + 1) * alpha); ++i) {
      const auto& q = b.field(i).modulus;
      std::vector<u64> t(n);
      kern.mul_scalar(target.residue(i).data(), p_mod_q[i], q.shoup(p_mod_q[i]), t.data(), n,
                      q.value());
      kern.add(b.residue(i).data(), t.data(), b.residue(i).data(), n, q.value());
    }
    key.b.push_back(std::move(b));
    key.a.push_back(std::move(a));
  }
  return key;
}

}  // namespace

std::vector<long> RotationKeySet::steps() const {
  std::vector<long> out;
  for (const auto& [k, v] : keys) out.push_back(k);
  return out;
}

long normalize_step(long step, std::size_t slots) {
  const long s = static_cast<long>(slots);
  long k = step % s;
  if (k < 0) k += s;
  if (k > s / 2) k -= s;
  return k;
}

std::vector<long> power_of_two_steps(std::size_t slots) {
  std::vector<long> out;
  for (std::size_t p = 1; p <= slots / 2; p <<= 1) {
    for (long sgn : {1L, -1L}) {
      const long k = normalize_step(sgn * static_cast<long>(p), slots);
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
  }
  return out;
}

SecretKey generate_secret_key(const Context& ctx, Prng& rng) {
  RingPoly s = ring::sample_ternary(ctx.basis(), ctx.max_level(), ctx.params().hamming_weight, rng,
                                    /*extended=*/true);
  ring::ntt_forward_inplace(s);
  return SecretKey{std::move(s), ctx.hash()};
}

PublicKey generate_public_key(const Context& ctx, const SecretKey& sk, Prng& rng) {
  if (sk.params_hash != ctx.hash()) throw ParamsMismatch("secret key belongs to other parameters");
  const std::size_t L = ctx.max_level();
  RingPoly a = ring::sample_uniform(ctx.basis(), L, rng, Domain::kNtt);
  RingPoly e = ring::sample_gaussian(ctx.basis(), L, ctx.params().sigma, rng);
  ring::ntt_forward_inplace(e);
  // s restricted to the base primes: the leading rows of the extended key.
  RingPoly s_base(ctx.basis(), L, Domain::kNtt);
  std::copy_n(sk.s.data().begin(), s_base.data().size(), s_base.data().begin());
  RingPoly b = ring::poly_sub(e, ring::poly_mul(a, s_base));
  return PublicKey{std::move(b), std::move(a), ctx.hash()};
}

EvaluationKey generate_evaluation_key(const Context& ctx, const SecretKey& sk, Prng& rng) {
  if (sk.params_hash != ctx.hash()) throw ParamsMismatch("secret key belongs to other parameters");
  const RingPoly s2 = ring::poly_mul(sk.s, sk.s);
  return EvaluationKey{make_switching_key(ctx, sk, s2, rng), ctx.hash()};
}

RotationKeySet generate_rotation_keys(const Context& ctx, const SecretKey& sk,
                                      std::span<const long> steps, Prng& rng) {
  if (sk.params_hash != ctx.hash()) throw ParamsMismatch("secret key belongs to other parameters");
  RotationKeySet set;
  set.params_hash = ctx.hash();
  for (long raw : steps) {
    const long step = normalize_step(raw, ctx.slot_count());
    if (step == 0 || set.has(step)) continue;
    Prng stream = rng.fork("rotation", static_cast<std::uint64_t>(step + (1L << 32)));
    const RingPoly rotated = ring::automorphism(sk.s, ctx.galois_element(step));
    set.keys.emplace(step, make_switching_key(ctx, sk, rotated, stream));
  }
  return set;
}

KeyBundle keygen(const Context& ctx, std::uint64_t seed) {
  const auto steps = power_of_two_steps(ctx.slot_count());
  return keygen(ctx, seed, steps);
}

KeyBundle keygen(const Context& ctx, std::uint64_t seed, std::span<const long> steps) {
  const Prng root(seed, "hefine/keygen");
  Prng sk_rng = root.fork("secret");
  Prng pk_rng = root.fork("public");
  Prng evk_rng = root.fork("relin");
  Prng rot_rng = root.fork("rotations");
  KeyBundle kb;
  kb.sk = generate_secret_key(ctx, sk_rng);
  kb.pk = generate_public_key(ctx, kb.sk, pk_rng);
  kb.evk = generate_evaluation_key(ctx, kb.sk, evk_rng);
  kb.rotations = generate_rotation_keys(ctx, kb.sk, steps, rot_rng);
  return kb;
}

}  // namespace hefine::ckks
