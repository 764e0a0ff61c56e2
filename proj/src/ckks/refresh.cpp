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

#include "hefine/ckks/refresh.hpp"

#include <algorithm>
#include <string>

#include "hefine/ckks/encoder.hpp"
#include "hefine/ckks/evaluator.hpp"
#include "hefine/ckks/serialize.hpp"
#include "hefine/common/error.hpp"

namespace hefine::ckks {

LocalRefresher::LocalRefresher(const Context& ctx, const SecretKey& sk, std::uint64_t seed)
    : ctx_(ctx), sk_(sk), rng_(seed, "refresh") {}

void LocalRefresher::refresh(std::span<Ciphertext* const> cts) {
  for (Ciphertext* ct : cts) {
    auto rng = rng_.fork("ciphertext", hash64(serialize(ctx_, *ct)));
    *ct = refresh_with_key(ctx_, *ct, sk_, rng);
  }
  ++rounds_;
}

Ciphertext refresh_with_key(const Context& ctx, const Ciphertext& ct, const SecretKey& sk, Prng& rng) {
  const auto values = decode(ctx, decrypt(ctx, ct, sk));
  const std::size_t top = ctx.max_level();
  return encrypt_sk(ctx, encode(ctx, values, ctx.scale_at(top), top), sk, rng);
}

void ensure_levels(std::span<Ciphertext* const> cts, std::size_t levels, Refresher* refresher) {
  const bool short_of_levels =
      std::any_of(cts.begin(), cts.end(), [&](const Ciphertext* ct) { return ct->level() <= levels; });
  if (!short_of_levels) return;
  if (!refresher) {
    throw LevelExhausted("need " + std::to_string(levels) + " more levels and no refresh channel");
  }
  refresher->refresh(cts);
  for (const Ciphertext* ct : cts) {
    if (ct->level() <= levels) {
      throw LevelExhausted("need " + std::to_string(levels) + " levels, more than the chain holds");
    }
  }
}

}  // namespace hefine::ckks
