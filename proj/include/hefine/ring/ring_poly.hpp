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
#include <vector>

#include "hefine/ring/rns.hpp"

namespace hefine::ring {

enum class Domain : std::uint8_t { kCoefficient = 0, kNtt = 1 };

/// An element of Z_Q[X]/(X^N+1) held as residues modulo the active primes.
///
/// The active primes are base primes 0..level-1, followed by every special
/// prime when `extended()` is set. Residues are stored row-major: row k holds
/// the N residues modulo the k-th active prime. RingPoly is a plain value
/// type; the free functions below never modify their arguments.
class RingPoly {
 public:
  RingPoly() = default;
  /// Zero polynomial.
  RingPoly(BasisPtr basis, std::size_t level, Domain domain, bool extended = false);

  /// Reduces signed integer coefficients into every active prime.
  static RingPoly from_signed(BasisPtr basis, std::size_t level, std::span<const std::int64_t> coeffs,
                              bool extended = false);

  const RnsBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  std::size_t level() const noexcept { return level_; }
  bool extended() const noexcept { return extended_; }
  Domain domain() const noexcept { return domain_; }
  std::size_t degree() const noexcept { return basis_ ? basis_->degree() : 0; }
  std::size_t prime_count() const noexcept;
  const PrimeField& field(std::size_t k) const;

  std::span<u64> residue(std::size_t k) { return {data_.data() + k * degree(), degree()}; }
  std::span<const u64> residue(std::size_t k) const {
    return {data_.data() + k * degree(), degree()};
  }
  std::span<u64> data() noexcept { return data_; }
  std::span<const u64> data() const noexcept { return data_; }

  bool is_zero() const noexcept;

  /// Reinterpretation hooks used by in-place algorithms; the caller is
  /// responsible for the residues matching the new description.
  void set_domain(Domain d) noexcept { domain_ = d; }
  void truncate_to_level(std::size_t level);

  friend bool operator==(const RingPoly& a, const RingPoly& b);

 private:
  BasisPtr basis_;
  std::size_t level_ = 0;
  bool extended_ = false;
  Domain domain_ = Domain::kCoefficient;
  std::vector<u64> data_;
};

/// Throws DomainMismatch unless both polys share basis, primes and domain.
void require_compatible(const RingPoly& a, const RingPoly& b, bool check_domain = true);

RingPoly ntt_forward(const RingPoly& p);
RingPoly ntt_inverse(const RingPoly& p);
RingPoly to_domain(const RingPoly& p, Domain d);

RingPoly poly_add(const RingPoly& a, const RingPoly& b);
RingPoly poly_sub(const RingPoly& a, const RingPoly& b);
RingPoly poly_neg(const RingPoly& a);
/// Negacyclic product. Result takes the domain of `a`; operands are moved to
/// the NTT domain internally as needed.
RingPoly poly_mul(const RingPoly& a, const RingPoly& b);
/// Multiplies by a small signed integer constant.
RingPoly poly_mul_scalar(const RingPoly& a, std::int64_t c);

/// X -> X^k for odd k in [1, 2N). Works in either domain.
RingPoly automorphism(const RingPoly& p, std::uint64_t k);
/// Index map for automorphism in the bit-reversed NTT domain:
/// out[i] = in[map[i]].
std::vector<std::uint32_t> ntt_automorphism_map(std::size_t n, std::uint64_t k);

/// Divides by the last active base prime with rounding and drops it:
/// residues of round(x / q_last) at level - 1. Accepts either domain; the
/// result keeps the input's domain. Extended polys are rejected.
RingPoly drop_last_prime(const RingPoly& p);
/// Drops trailing base primes without division (reduction modulo a divisor).
RingPoly drop_to_level(const RingPoly& p, std::size_t level);

// In-place variants for hot paths; same preconditions as the pure versions.
void add_inplace(RingPoly& a, const RingPoly& b);
void sub_inplace(RingPoly& a, const RingPoly& b);
void neg_inplace(RingPoly& a);
void mul_inplace(RingPoly& a, const RingPoly& b);  // both NTT domain
void mul_add_inplace(RingPoly& acc, const RingPoly& a, const RingPoly& b);  // NTT domain
void ntt_forward_inplace(RingPoly& p);
void ntt_inverse_inplace(RingPoly& p);
/// Multiplies residue k by consts[k] (already reduced mod that prime).
void mul_rns_scalar_inplace(RingPoly& a, std::span<const u64> consts);
void drop_last_prime_inplace(RingPoly& p);

}  // namespace hefine::ring
