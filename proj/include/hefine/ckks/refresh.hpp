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
#include <cstdint>
#include <span>

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/common/prng.hpp"

namespace hefine::ckks {

/// Re-encrypts ciphertexts at the top of the modulus chain. The key holder
/// performs the round trip; the evaluator only sees fresh ciphertexts of
/// the same values come back.
class Refresher {
 public:
  virtual ~Refresher() = default;
  /// Replaces each ciphertext with a fresh top-level encryption of its
  /// decrypted slots.
  virtual void refresh(std::span<Ciphertext* const> cts) = 0;
};

/// Refresher holding the secret key directly; used by the hospital side of
/// the protocol and by tests. The encryption randomness for each
/// ciphertext is drawn from a stream keyed by the seed and a hash of the
/// incoming ciphertext, so replaying the same computation (a resumed run,
/// a second identical session) yields byte-identical results.
class LocalRefresher final : public Refresher {
 public:
  LocalRefresher(const Context& ctx, const SecretKey& sk, std::uint64_t seed);
  void refresh(std::span<Ciphertext* const> cts) override;
  /// Number of refresh() calls served.
  std::size_t rounds() const noexcept { return rounds_; }

 private:
  const Context& ctx_;
  const SecretKey& sk_;
  Prng rng_;
  std::size_t rounds_ = 0;
};

/// Decrypts, decodes and re-encrypts one ciphertext at the top level.
Ciphertext refresh_with_key(const Context& ctx, const Ciphertext& ct, const SecretKey& sk, Prng& rng);

/// Makes sure every ciphertext keeps more than `levels` levels: if one
/// falls short, all of them go through the refresher together. Throws
/// LevelExhausted when a refresh is needed and `refresher` is null.
void ensure_levels(std::span<Ciphertext* const> cts, std::size_t levels, Refresher* refresher);

}  // namespace hefine::ckks
