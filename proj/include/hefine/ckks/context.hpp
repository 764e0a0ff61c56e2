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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hefine/ckks/params.hpp"
#include "hefine/ring/rns.hpp"

namespace hefine::ckks {

class Context;
using ContextPtr = std::shared_ptr<const Context>;

/// Immutable precomputation derived from CkksParams: the RNS basis, the
/// canonical scale of every level, encoder tables and the base converters
/// used by hybrid key switching. Build once per parameter set and share.
class Context {
 public:
  static ContextPtr create(const CkksParams& params);

  const CkksParams& params() const noexcept { return params_; }
  std::uint64_t hash() const noexcept { return hash_; }
  const ring::BasisPtr& basis() const noexcept { return basis_; }
  std::size_t degree() const noexcept { return params_.ring_degree; }
  std::size_t slot_count() const noexcept { return params_.slot_count(); }
  std::size_t max_level() const noexcept { return params_.max_level(); }

  /// Canonical scale of a fresh ciphertext at `level` (1..max_level):
  /// S(top) = 2^log2_scale and S(l-1) = S(l)^2 / q_{l-1}.
  double scale_at(std::size_t level) const;
  /// q_{level-1}, the prime removed by rescaling a level-`level` ciphertext.
  u64 last_prime(std::size_t level) const { return params_.base_primes.at(level - 1); }

  // ---- hybrid key switching ----
  /// Primes per decomposition digit (= number of special primes).
  std::size_t digit_size() const noexcept { return params_.special_primes.size(); }
  std::size_t digit_count(std::size_t level) const noexcept {
    return (level + digit_size() - 1) / digit_size();
  }
  /// Converter from digit `digit`'s primes to every other prime of the
  /// extended level-`level` basis (remaining base primes, then specials).
  const ring::BasisConverter& mod_up(std::size_t level, std::size_t digit) const;
  /// Converter from the special primes to base primes 0..level-1.
  const ring::BasisConverter& mod_down(std::size_t level) const;
  /// P mod q_i and P^-1 mod q_i for every base prime.
  std::span<const u64> special_product_mod_base() const noexcept { return p_mod_q_; }
  std::span<const u64> special_product_inv_mod_base() const noexcept { return p_inv_mod_q_; }

  // ---- encoder ----
  /// 5^j mod 2N for j < slot_count.
  std::span<const std::uint64_t> rotation_group() const noexcept { return rot_group_; }
  /// exp(2 pi i k / 2N) for k in [0, 2N].
  std::span<const std::complex<double>> root_powers() const noexcept { return roots_; }
  /// Galois element 5^step (mod 2N) for a left rotation by `step` slots.
  std::uint64_t galois_element(long step) const;

 private:
  explicit Context(const CkksParams& params);

  CkksParams params_;
  std::uint64_t hash_;
  ring::BasisPtr basis_;
  std::vector<double> scales_;  // index = level
  std::vector<std::vector<ring::BasisConverter>> mod_up_;  // [level][digit]
  std::vector<ring::BasisConverter> mod_down_;             // [level]
  std::vector<u64> p_mod_q_, p_inv_mod_q_;
  std::vector<std::uint64_t> rot_group_;
  std::vector<std::complex<double>> roots_;
};

}  // namespace hefine::ckks
