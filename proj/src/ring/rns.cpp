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

#include "hefine/ring/rns.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "hefine/common/error.hpp"
#include "hefine/ring/kernels.hpp"

namespace hefine::ring {

namespace {

u64 checked_prime(u64 prime, std::size_t ring_degree) {
  if (!is_prime(prime)) {
    throw InvalidArgument("modulus " + std::to_string(prime) + " is not prime");
  }
  if ((prime - 1) % (2 * ring_degree) != 0) {
    throw InvalidArgument("prime " + std::to_string(prime) + " is not 1 mod 2N");
  }
  return prime;
}

}  // namespace

PrimeField::PrimeField(u64 prime, std::size_t ring_degree)
    : modulus(checked_prime(prime, ring_degree)), ntt(modulus, ring_degree) {}

RnsBasis::RnsBasis(std::size_t ring_degree, std::span<const u64> base_primes,
                   std::span<const u64> special_primes)
    : degree_(ring_degree), log_degree_(std::countr_zero(ring_degree)) {
  if (ring_degree < 2 || !std::has_single_bit(ring_degree)) {
    throw InvalidArgument("ring degree must be a power of two >= 2");
  }
  if (base_primes.empty()) throw InvalidArgument("basis needs at least one prime");
  std::vector<u64> all(base_primes.begin(), base_primes.end());
  all.insert(all.end(), special_primes.begin(), special_primes.end());
  std::vector<u64> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("RNS primes must be pairwise distinct");
  }
  base_.reserve(base_primes.size());
  for (u64 p : base_primes) base_.emplace_back(p, ring_degree);
  special_.reserve(special_primes.size());
  for (u64 p : special_primes) special_.emplace_back(p, ring_degree);
}

BasisConverter::BasisConverter(std::vector<Modulus> from, std::vector<Modulus> to)
    : from_(std::move(from)), to_(std::move(to)) {
  const std::size_t k = from_.size();
  punctured_inverse_.resize(k);
  punctured_inverse_shoup_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    u64 prod = 1;
    for (std::size_t m = 0; m < k; ++m) {
      if (m != i) prod = from_[i].mul(prod, from_[m].value() % from_[i].value());
    }
    punctured_inverse_[i] = from_[i].inverse(prod);
    punctured_inverse_shoup_[i] = from_[i].shoup(punctured_inverse_[i]);
  }
  punctured_mod_to_.resize(to_.size() * k);
  for (std::size_t j = 0; j < to_.size(); ++j) {
    for (std::size_t i = 0; i < k; ++i) {
      u64 prod = 1;
      for (std::size_t m = 0; m < k; ++m) {
        if (m != i) prod = to_[j].mul(prod, to_[j].reduce(from_[m].value()));
      }
      punctured_mod_to_[j * k + i] = prod;
    }
    u64 full = 1;
    for (std::size_t m = 0; m < k; ++m) full = to_[j].mul(full, to_[j].reduce(from_[m].value()));
    product_mod_to_.push_back(full);
  }
  for (const auto& a : from_) inverse_from_.push_back(1.0 / static_cast<double>(a.value()));
}

void BasisConverter::convert(std::span<const u64> in, std::span<u64> out, std::size_t n) const {
  const std::size_t k = from_.size();
  if (in.size() != k * n || out.size() != to_.size() * n) {
    throw InvalidArgument("BasisConverter: residue buffer size mismatch");
  }
  const Kernels& kern = kernels();
  // y_i = x_i * (A/a_i)^-1 mod a_i, then out_j = sum_i y_i * (A/a_i) mod b_j.
  std::vector<u64> scaled(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    kern.mul_scalar(in.data() + i * n, punctured_inverse_[i], punctured_inverse_shoup_[i],
                    scaled.data() + i * n, n, from_[i].value());
  }
  std::vector<u64> term(n);
  for (std::size_t j = 0; j < to_.size(); ++j) {
    const Modulus& b = to_[j];
    u64* dst = out.data() + j * n;
    std::fill(dst, dst + n, 0);
    for (std::size_t i = 0; i < k; ++i) {
      const u64 factor = punctured_mod_to_[j * k + i];
      const u64 factor_shoup = b.shoup(factor);
      const u64* src = scaled.data() + i * n;
      // y_i < a_i may exceed b_j; Shoup multiplication accepts any word input.
      kern.mul_scalar(src, factor, factor_shoup, term.data(), n, b.value());
      kern.add(dst, term.data(), dst, n, b.value());
    }
  }
}

void BasisConverter::convert_centered(std::span<const u64> in, std::span<u64> out,
                                      std::size_t n) const {
  const std::size_t k = from_.size();
  if (in.size() != k * n || out.size() != to_.size() * n) {
    throw InvalidArgument("BasisConverter: residue buffer size mismatch");
  }
  const Kernels& kern = kernels();
  std::vector<u64> scaled(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    kern.mul_scalar(in.data() + i * n, punctured_inverse_[i], punctured_inverse_shoup_[i],
                    scaled.data() + i * n, n, from_[i].value());
  }
  // sum_i y_i (A/a_i) = x + u*A with u = floor(sum_i y_i / a_i); rounding
  // instead of flooring selects the centred representative.
  std::vector<u64> v(n);
  for (std::size_t c = 0; c < n; ++c) {
    double frac = 0;
    for (std::size_t i = 0; i < k; ++i) frac += static_cast<double>(scaled[i * n + c]) * inverse_from_[i];
    v[c] = static_cast<u64>(std::llround(frac));
  }
  std::vector<u64> term(n);
  for (std::size_t j = 0; j < to_.size(); ++j) {
    const Modulus& b = to_[j];
    u64* dst = out.data() + j * n;
    std::fill(dst, dst + n, 0);
    for (std::size_t i = 0; i < k; ++i) {
      const u64 factor = punctured_mod_to_[j * k + i];
      kern.mul_scalar(scaled.data() + i * n, factor, b.shoup(factor), term.data(), n, b.value());
      kern.add(dst, term.data(), dst, n, b.value());
    }
    const u64 a_mod = product_mod_to_[j];
    kern.mul_scalar(v.data(), a_mod, b.shoup(a_mod), term.data(), n, b.value());
    kern.sub(dst, term.data(), dst, n, b.value());
  }
}

u64 nearest_ntt_prime(double target, std::size_t ring_degree, std::span<const u64> exclude,
                      int max_bits) {
  const u64 step = 2 * static_cast<u64>(ring_degree);
  const double base = std::floor(target / static_cast<double>(step));
  const u64 k0 = static_cast<u64>(std::max(1.0, base));
  const u64 limit = max_bits >= 64 ? UINT64_MAX : (1ULL << max_bits);
  auto usable = [&](u64 p) {
    return p < limit && is_prime(p) &&
           std::find(exclude.begin(), exclude.end(), p) == exclude.end();
  };
  // Candidates ordered by distance to target.
  for (u64 d = 0; d < (1ULL << 40); ++d) {
    const u64 up = (k0 + 1 + d) * step + 1;
    const u64 down = k0 > d ? (k0 - d) * step + 1 : 0;
    const double du = std::abs(static_cast<double>(up) - target);
    const double dd = down ? std::abs(static_cast<double>(down) - target) : INFINITY;
    if (dd <= du) {
      if (down && usable(down)) return down;
      if (usable(up)) return up;
    } else {
      if (usable(up)) return up;
      if (down && usable(down)) return down;
    }
  }
  throw InvalidArgument("no NTT prime found near target");
}

}  // namespace hefine::ring
