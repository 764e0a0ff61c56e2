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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hefine {

/// Deterministic ChaCha20 keystream generator.
///
/// Every random draw in the library goes through an explicitly constructed
/// Prng, so keys, ciphertexts and datasets are reproducible from a seed.
/// Child streams derived with fork() are independent of the parent's
/// position, which lets callers hand out per-purpose streams without
/// worrying about draw order.
class Prng {
 public:
  using Key = std::array<std::uint8_t, 32>;

  explicit Prng(std::uint64_t seed, std::string_view domain = {});
  explicit Prng(const Key& key);

  /// Stream keyed by H(this key || label || index); does not advance *this.
  Prng fork(std::string_view label, std::uint64_t index = 0) const;

  std::uint64_t next_u64();
  /// Uniform in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal via Box-Muller.
  double normal();
  void fill(std::span<std::uint8_t> out);

  const Key& key() const noexcept { return key_; }

 private:
  void refill();

  Key key_{};
  std::array<std::uint8_t, 1024> buffer_{};
  std::size_t pos_ = sizeof(buffer_);
  std::uint32_t block_counter_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// BLAKE2b digest truncated to 8 bytes; used for parameter fingerprints.
std::uint64_t hash64(std::span<const std::uint8_t> bytes);

}  // namespace hefine
