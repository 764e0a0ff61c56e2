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

#include "hefine/ckks/context.hpp"

#include <cmath>
#include <numbers>

#include "hefine/common/error.hpp"

namespace hefine::ckks {

using ring::Modulus;

ContextPtr Context::create(const CkksParams& params) {
  return ContextPtr(new Context(params));
}

Context::Context(const CkksParams& params) : params_(params), hash_(params_hash(params)) {
  validate(params_);
  if (params_.special_primes.empty()) {
    throw InvalidArgument("key switching needs at least one special prime");
  }
  basis_ = std::make_shared<const ring::RnsBasis>(params_.ring_degree, params_.base_primes,
                                                  params_.special_primes);
  const std::size_t L = max_level();

  scales_.assign(L + 1, 0.0);
  scales_[L] = std::ldexp(1.0, params_.log2_scale);
  for (std::size_t l = L; l > 1; --l) {
    scales_[l - 1] = scales_[l] * scales_[l] / static_cast<double>(params_.base_primes[l - 1]);
  }

  std::vector<Modulus> specials;
  for (u64 p : params_.special_primes) specials.emplace_back(p);

  mod_up_.resize(L + 1);
  mod_down_.reserve(L + 1);
  mod_down_.emplace_back(std::vector<Modulus>{}, std::vector<Modulus>{});  // level 0 unused
  const std::size_t alpha = digit_size();
  for (std::size_t l = 1; l <= L; ++l) {
    for (std::size_t j = 0; j * alpha < l; ++j) {
      const std::size_t lo = j * alpha, hi = std::min(l, lo + alpha);
      std::vector<Modulus> from, to;
      for (std::size_t i = 0; i < l; ++i) {
        (i >= lo && i < hi ? from : to).emplace_back(params_.base_primes[i]);
      }
      to.insert(to.end(), specials.begin(), specials.end());
      mod_up_[l].emplace_back(std::move(from), std::move(to));
    }
    std::vector<Modulus> base;
    for (std::size_t i = 0; i < l; ++i) base.emplace_back(params_.base_primes[i]);
    mod_down_.emplace_back(specials, std::move(base));
  }

  for (u64 q : params_.base_primes) {
    const Modulus m(q);
    u64 prod = 1;
    for (u64 p : params_.special_primes) prod = m.mul(prod, m.reduce(p));
    p_mod_q_.push_back(prod);
    p_inv_mod_q_.push_back(m.inverse(prod));
  }

  const std::size_t slots = slot_count();
  const std::uint64_t two_n = 2 * degree();
  rot_group_.resize(slots);
  std::uint64_t g = 1;
  for (std::size_t j = 0; j < slots; ++j) {
    rot_group_[j] = g;
    g = (g * 5) % two_n;
  }
  roots_.resize(two_n + 1);
  for (std::uint64_t k = 0; k <= two_n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(two_n);
    roots_[k] = {std::cos(angle), std::sin(angle)};
  }
}

double Context::scale_at(std::size_t level) const {
  if (level == 0 || level > max_level()) {
    throw InvalidArgument("level " + std::to_string(level) + " outside the modulus chain");
  }
  return scales_[level];
}

const ring::BasisConverter& Context::mod_up(std::size_t level, std::size_t digit) const {
  return mod_up_.at(level).at(digit);
}

const ring::BasisConverter& Context::mod_down(std::size_t level) const {
  return mod_down_.at(level);
}

std::uint64_t Context::galois_element(long step) const {
  const long slots = static_cast<long>(slot_count());
  long k = step % slots;
  if (k < 0) k += slots;
  return rot_group_[static_cast<std::size_t>(k)];
}

}  // namespace hefine::ckks
