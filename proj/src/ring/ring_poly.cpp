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

#include "hefine/ring/ring_poly.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "hefine/common/error.hpp"
#include "hefine/ring/kernels.hpp"

namespace hefine::ring {

RingPoly::RingPoly(BasisPtr basis, std::size_t level, Domain domain, bool extended)
    : basis_(std::move(basis)), level_(level), extended_(extended), domain_(domain) {
  if (!basis_) throw InvalidArgument("RingPoly needs a basis");
  if (level_ == 0 || level_ > basis_->base_count()) {
    throw InvalidArgument("RingPoly level " + std::to_string(level_) + " outside [1, " +
                          std::to_string(basis_->base_count()) + "]");
  }
  data_.assign(prime_count() * basis_->degree(), 0);
}

RingPoly RingPoly::from_signed(BasisPtr basis, std::size_t level,
                               std::span<const std::int64_t> coeffs, bool extended) {
  RingPoly p(std::move(basis), level, Domain::kCoefficient, extended);
  if (coeffs.size() > p.degree()) throw InvalidArgument("too many coefficients for ring degree");
  for (std::size_t k = 0; k < p.prime_count(); ++k) {
    const Modulus& q = p.field(k).modulus;
    auto row = p.residue(k);
    for (std::size_t i = 0; i < coeffs.size(); ++i) row[i] = q.from_signed(coeffs[i]);
  }
  return p;
}

std::size_t RingPoly::prime_count() const noexcept {
  if (!basis_) return 0;
  return level_ + (extended_ ? basis_->special_count() : 0);
}

const PrimeField& RingPoly::field(std::size_t k) const {
  return k < level_ ? basis_->base(k) : basis_->special(k - level_);
}

bool RingPoly::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](u64 v) { return v == 0; });
}

void RingPoly::truncate_to_level(std::size_t level) {
  if (extended_) throw InvalidArgument("cannot truncate an extended polynomial");
  if (level == 0 || level > level_) throw InvalidArgument("truncate_to_level: bad target level");
  level_ = level;
  data_.resize(level_ * degree());
}

bool operator==(const RingPoly& a, const RingPoly& b) {
  return a.basis_ == b.basis_ && a.level_ == b.level_ && a.extended_ == b.extended_ &&
         a.domain_ == b.domain_ && a.data_ == b.data_;
}

void require_compatible(const RingPoly& a, const RingPoly& b, bool check_domain) {
  if (a.basis_ptr() != b.basis_ptr()) throw DomainMismatch("polynomials use different bases");
  if (a.level() != b.level() || a.extended() != b.extended()) {
    throw DomainMismatch("polynomial levels differ (" + std::to_string(a.level()) + " vs " +
                         std::to_string(b.level()) + ")");
  }
  if (check_domain && a.domain() != b.domain()) {
    throw DomainMismatch("polynomials are in different domains");
  }
}

void ntt_forward_inplace(RingPoly& p) {
  if (p.domain() != Domain::kCoefficient) throw DomainMismatch("ntt_forward expects coefficient form");
  const Kernels& k = kernels();
  for (std::size_t i = 0; i < p.prime_count(); ++i) k.ntt_forward(p.residue(i).data(), p.field(i).ntt);
  p.set_domain(Domain::kNtt);
}

void ntt_inverse_inplace(RingPoly& p) {
  if (p.domain() != Domain::kNtt) throw DomainMismatch("ntt_inverse expects NTT form");
  const Kernels& k = kernels();
  for (std::size_t i = 0; i < p.prime_count(); ++i) k.ntt_inverse(p.residue(i).data(), p.field(i).ntt);
  p.set_domain(Domain::kCoefficient);
}

RingPoly ntt_forward(const RingPoly& p) {
  RingPoly r = p;
  ntt_forward_inplace(r);
  return r;
}

RingPoly ntt_inverse(const RingPoly& p) {
  RingPoly r = p;
  ntt_inverse_inplace(r);
  return r;
}

RingPoly to_domain(const RingPoly& p, Domain d) {
  if (p.domain() == d) return p;
  return d == Domain::kNtt ? ntt_forward(p) : ntt_inverse(p);
}

void add_inplace(RingPoly& a, const RingPoly& b) {
  require_compatible(a, b);
  const Kernels& k = kernels();
  const std::size_t n = a.degree();
  for (std::size_t i = 0; i < a.prime_count(); ++i) {
    k.add(a.residue(i).data(), b.residue(i).data(), a.residue(i).data(), n, a.field(i).value());
  }
}

void sub_inplace(RingPoly& a, const RingPoly& b) {
  require_compatible(a, b);
  const Kernels& k = kernels();
  const std::size_t n = a.degree();
  for (std::size_t i = 0; i < a.prime_count(); ++i) {
    k.sub(a.residue(i).data(), b.residue(i).data(), a.residue(i).data(), n, a.field(i).value());
  }
}

void neg_inplace(RingPoly& a) {
  const Kernels& k = kernels();
  for (std::size_t i = 0; i < a.prime_count(); ++i) {
    k.neg(a.residue(i).data(), a.residue(i).data(), a.degree(), a.field(i).value());
  }
}

void mul_inplace(RingPoly& a, const RingPoly& b) {
  require_compatible(a, b);
  if (a.domain() != Domain::kNtt) throw DomainMismatch("mul_inplace expects NTT form");
  const Kernels& k = kernels();
  for (std::size_t i = 0; i < a.prime_count(); ++i) {
    k.mul(a.residue(i).data(), b.residue(i).data(), a.residue(i).data(), a.degree(),
          a.field(i).modulus);
  }
}

void mul_add_inplace(RingPoly& acc, const RingPoly& a, const RingPoly& b) {
  require_compatible(acc, a);
  require_compatible(a, b);
  if (a.domain() != Domain::kNtt) throw DomainMismatch("mul_add_inplace expects NTT form");
  const Kernels& k = kernels();
  for (std::size_t i = 0; i < a.prime_count(); ++i) {
    k.mul_add(a.residue(i).data(), b.residue(i).data(), acc.residue(i).data(), a.degree(),
              a.field(i).modulus);
  }
}

void mul_rns_scalar_inplace(RingPoly& a, std::span<const u64> consts) {
  if (consts.size() != a.prime_count()) throw InvalidArgument("one constant per prime required");
  const Kernels& k = kernels();
  for (std::size_t i = 0; i < a.prime_count(); ++i) {
    const Modulus& q = a.field(i).modulus;
    k.mul_scalar(a.residue(i).data(), consts[i], q.shoup(consts[i]), a.residue(i).data(),
                 a.degree(), q.value());
  }
}

RingPoly poly_add(const RingPoly& a, const RingPoly& b) {
  RingPoly r = a;
  add_inplace(r, b);
  return r;
}

RingPoly poly_sub(const RingPoly& a, const RingPoly& b) {
  RingPoly r = a;
  sub_inplace(r, b);
  return r;
}

RingPoly poly_neg(const RingPoly& a) {
  RingPoly r = a;
  neg_inplace(r);
  return r;
}

RingPoly poly_mul(const RingPoly& a, const RingPoly& b) {
  require_compatible(a, b, /*check_domain=*/false);
  RingPoly x = to_domain(a, Domain::kNtt);
  mul_inplace(x, to_domain(b, Domain::kNtt));
  return a.domain() == Domain::kNtt ? x : ntt_inverse(x);
}

RingPoly poly_mul_scalar(const RingPoly& a, std::int64_t c) {
  std::vector<u64> consts(a.prime_count());
  for (std::size_t i = 0; i < consts.size(); ++i) consts[i] = a.field(i).modulus.from_signed(c);
  RingPoly r = a;
  mul_rns_scalar_inplace(r, consts);
  return r;
}

std::vector<std::uint32_t> ntt_automorphism_map(std::size_t n, std::uint64_t k) {
  const int log_n = std::countr_zero(n);
  const std::uint64_t two_n = 2 * n;
  std::vector<std::uint32_t> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Slot i holds the evaluation at psi^e with e = 2*bitrev(i)+1.
    const std::uint64_t e = 2 * bit_reverse(i, log_n) + 1;
    const std::uint64_t src_e = (e * k) % two_n;
    map[i] = static_cast<std::uint32_t>(bit_reverse((src_e - 1) / 2, log_n));
  }
  return map;
}

RingPoly automorphism(const RingPoly& p, std::uint64_t k) {
  const std::size_t n = p.degree();
  if (k % 2 == 0 || k == 0 || k >= 2 * n) {
    throw InvalidArgument("automorphism index must be odd and in [1, 2N)");
  }
  RingPoly out(p.basis_ptr(), p.level(), p.domain(), p.extended());
  if (p.domain() == Domain::kNtt) {
    const auto map = ntt_automorphism_map(n, k);
    for (std::size_t r = 0; r < p.prime_count(); ++r) {
      auto src = p.residue(r);
      auto dst = out.residue(r);
      for (std::size_t i = 0; i < n; ++i) dst[i] = src[map[i]];
    }
    return out;
  }
  const std::uint64_t mask = 2 * n - 1;
  for (std::size_t r = 0; r < p.prime_count(); ++r) {
    const Modulus& q = p.field(r).modulus;
    auto src = p.residue(r);
    auto dst = out.residue(r);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t e = (i * k) & mask;
      if (e < n) {
        dst[e] = src[i];
      } else {
        dst[e - n] = q.neg(src[i]);
      }
    }
  }
  return out;
}

void drop_last_prime_inplace(RingPoly& p) {
  if (p.extended()) throw InvalidArgument("drop_last_prime on an extended polynomial");
  if (p.level() < 2) throw LevelExhausted("cannot drop the last remaining prime");
  const std::size_t n = p.degree();
  const std::size_t last = p.level() - 1;
  const PrimeField& ql = p.field(last);
  const u64 half = ql.value() >> 1;
  const Kernels& kern = kernels();

  // round(x / q) = (x + h - r) / q with r = (x + h) mod q, h = floor(q/2).
  std::vector<u64> r(p.residue(last).begin(), p.residue(last).end());
  if (p.domain() == Domain::kNtt) kern.ntt_inverse(r.data(), ql.ntt);
  for (auto& v : r) v = ql.modulus.add(v, half);

  std::vector<u64> t(n);
  for (std::size_t i = 0; i < last; ++i) {
    const PrimeField& qi = p.field(i);
    const Modulus& m = qi.modulus;
    const u64 half_i = m.reduce(half);
    // t = r - h as a signed value, reduced mod q_i.
    for (std::size_t j = 0; j < n; ++j) t[j] = m.sub(m.reduce(r[j]), half_i);
    if (p.domain() == Domain::kNtt) kern.ntt_forward(t.data(), qi.ntt);
    const u64 inv = m.inverse(m.reduce(ql.value()));
    u64* row = p.residue(i).data();
    kern.sub(row, t.data(), row, n, m.value());
    kern.mul_scalar(row, inv, m.shoup(inv), row, n, m.value());
  }
  p.truncate_to_level(last);
}

RingPoly drop_last_prime(const RingPoly& p) {
  RingPoly r = p;
  drop_last_prime_inplace(r);
  return r;
}

RingPoly drop_to_level(const RingPoly& p, std::size_t level) {
  RingPoly r = p;
  r.truncate_to_level(level);
  return r;
}

}  // namespace hefine::ring
