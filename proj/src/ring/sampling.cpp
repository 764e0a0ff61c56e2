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

#include "hefine/ring/sampling.hpp"

#include <cmath>
#include <numeric>

#include "hefine/common/error.hpp"

namespace hefine::ring {

std::vector<std::int64_t> ternary_coeffs(std::size_t n, std::size_t hamming_weight, Prng& rng) {
  if (hamming_weight > n) throw InvalidArgument("hamming weight exceeds ring degree");
  std::vector<std::int64_t> out(n, 0);
  // Partial Fisher-Yates: the first h entries of the shuffled index list
  // become the support.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < hamming_weight; ++i) {
    const std::size_t j = i + rng.uniform_below(n - i);
    std::swap(idx[i], idx[j]);
    out[idx[i]] = (rng.next_u64() & 1) ? 1 : -1;
  }
  return out;
}

std::vector<std::int64_t> gaussian_coeffs(std::size_t n, double sigma, Prng& rng) {
  if (!(sigma > 0)) throw InvalidArgument("gaussian sigma must be positive");
  const double bound = 6.0 * sigma;
  std::vector<std::int64_t> out(n);
  for (auto& v : out) {
    double x;
    do {
      x = std::round(rng.normal() * sigma);
    } while (std::abs(x) > bound);
    v = static_cast<std::int64_t>(x);
  }
  return out;
}

RingPoly sample_ternary(const BasisPtr& basis, std::size_t level, std::size_t hamming_weight,
                        Prng& rng, bool extended) {
  const auto c = ternary_coeffs(basis->degree(), hamming_weight, rng);
  return RingPoly::from_signed(basis, level, c, extended);
}

RingPoly sample_gaussian(const BasisPtr& basis, std::size_t level, double sigma, Prng& rng,
                         bool extended) {
  const auto c = gaussian_coeffs(basis->degree(), sigma, rng);
  return RingPoly::from_signed(basis, level, c, extended);
}

RingPoly sample_uniform(const BasisPtr& basis, std::size_t level, Prng& rng, Domain domain,
                        bool extended) {
  RingPoly p(basis, level, domain, extended);
  for (std::size_t k = 0; k < p.prime_count(); ++k) {
    const u64 q = p.field(k).value();
    for (auto& v : p.residue(k)) v = rng.uniform_below(q);
  }
  return p;
}

}  // namespace hefine::ring
