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
#include <memory>
#include <span>
#include <vector>

#include "hefine/ring/modulus.hpp"
#include "hefine/ring/ntt.hpp"

namespace hefine::ring {

/// One NTT-friendly prime together with its transform tables.
struct PrimeField {
  PrimeField(u64 prime, std::size_t ring_degree);

  u64 value() const noexcept { return modulus.value(); }

  Modulus modulus;
  NttTables ntt;
};

/// Ordered residue basis for Z_Q[X]/(X^N+1).
///
/// `base` primes form the ciphertext modulus chain (a polynomial at level l
/// uses base primes 0..l-1). `special` primes are only appended during key
/// switching. Both lists are immutable once built; share the basis through a
/// shared_ptr so polynomials can outlive the object that created them.
class RnsBasis {
 public:
  RnsBasis(std::size_t ring_degree, std::span<const u64> base_primes,
           std::span<const u64> special_primes = {});

  std::size_t degree() const noexcept { return degree_; }
  int log_degree() const noexcept { return log_degree_; }
  std::size_t base_count() const noexcept { return base_.size(); }
  std::size_t special_count() const noexcept { return special_.size(); }
  const PrimeField& base(std::size_t i) const { return base_.at(i); }
  const PrimeField& special(std::size_t j) const { return special_.at(j); }

 private:
  std::size_t degree_;
  int log_degree_;
  std::vector<PrimeField> base_;
  std::vector<PrimeField> special_;
};

using BasisPtr = std::shared_ptr<const RnsBasis>;

/// Fast (approximate) RNS base conversion between two disjoint prime sets.
///
/// Given residues of x in [0, A) over primes A, produces residues over B of
/// x + u*A for some 0 <= u < |A|. This is the standard building block for
/// modulus raising and lowering during key switching.
class BasisConverter {
 public:
  BasisConverter(std::vector<Modulus> from, std::vector<Modulus> to);

  /// in: from.size() residue rows of n words; out: to.size() rows of n words.
  void convert(std::span<const u64> in, std::span<u64> out, std::size_t n) const;
  /// Exact conversion of the centred representative of x, |x| <= A/2: the
  /// overflow count is estimated in floating point and subtracted. Inputs
  /// within a unit of A/2 may land on either side. Used where the u*A term
  /// of convert() would bias the result.
  void convert_centered(std::span<const u64> in, std::span<u64> out, std::size_t n) const;

  const std::vector<Modulus>& from() const noexcept { return from_; }
  const std::vector<Modulus>& to() const noexcept { return to_; }

 private:
  std::vector<Modulus> from_;
  std::vector<Modulus> to_;
  std::vector<u64> punctured_inverse_;        // (A/a_i)^-1 mod a_i
  std::vector<u64> punctured_inverse_shoup_;
  std::vector<u64> punctured_mod_to_;         // (A/a_i) mod b_j, row-major [j][i]
  std::vector<u64> product_mod_to_;           // A mod b_j
  std::vector<double> inverse_from_;          // 1 / a_i
};

/// Searches primes p = 1 (mod 2N) nearest to `target`, alternating above and
/// below, skipping any value in `exclude`.
u64 nearest_ntt_prime(double target, std::size_t ring_degree, std::span<const u64> exclude,
                      int max_bits = kMaxModulusBits);

}  // namespace hefine::ring
