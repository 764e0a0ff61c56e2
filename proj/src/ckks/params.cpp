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

#include "hefine/ckks/params.hpp"

#include <bit>
#include <cmath>

#include "hefine/common/bytes.hpp"
#include "hefine/common/error.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/ring/rns.hpp"

namespace hefine::ckks {

namespace {

struct ProfileShape {
  int log_n;
  int q0_bits;
  int rescale_primes;
  int special_primes;
  int special_bits;
};

ProfileShape shape_of(SecurityProfile p) {
  switch (p) {
    case SecurityProfile::kTest:
      return {13, 60, 23, 4, 60};
    case SecurityProfile::kSecure128:
      return {15, 60, 14, 3, 60};
  }
  throw InvalidArgument("unknown security profile");
}

}  // namespace

std::string_view profile_name(SecurityProfile p) {
  return p == SecurityProfile::kTest ? "test" : "secure128";
}

SecurityProfile parse_profile(std::string_view name) {
  if (name == "test") return SecurityProfile::kTest;
  if (name == "secure128") return SecurityProfile::kSecure128;
  throw InvalidArgument("unknown profile '" + std::string(name) + "' (expected test|secure128)");
}

double CkksParams::log2_qp() const {
  double bits = 0;
  for (u64 q : base_primes) bits += std::log2(static_cast<double>(q));
  for (u64 p : special_primes) bits += std::log2(static_cast<double>(p));
  return bits;
}

double secure128_log_qp_bound(std::size_t ring_degree) {
  switch (ring_degree) {
    case 1024: return 27;
    case 2048: return 54;
    case 4096: return 109;
    case 8192: return 218;
    case 16384: return 438;
    case 32768: return 881;
    case 65536: return 1761;
    default: return 0;
  }
}

CkksParams make_params(SecurityProfile profile) {
  const ProfileShape s = shape_of(profile);
  CkksParams p;
  p.profile = profile;
  p.ring_degree = std::size_t{1} << s.log_n;
  p.hamming_weight = p.ring_degree / 2;
  p.log2_scale = 40;

  std::vector<u64> used;
  const u64 q0 = ring::nearest_ntt_prime(std::ldexp(1.0, s.q0_bits), p.ring_degree, used);
  used.push_back(q0);
  for (int i = 0; i < s.special_primes; ++i) {
    const u64 sp = ring::nearest_ntt_prime(std::ldexp(1.0, s.special_bits), p.ring_degree, used);
    used.push_back(sp);
    p.special_primes.push_back(sp);
  }
  // Walk down from the top level choosing q_{l-1} ~ S(l)^2 / 2^40, so every
  // canonical scale S(l-1) = S(l)^2 / q_{l-1} stays next to 2^40 instead of
  // drifting with the primes' distance from a power of two.
  const double target = std::ldexp(1.0, p.log2_scale);
  std::vector<u64> rescale(s.rescale_primes);
  double scale = target;
  for (int i = s.rescale_primes - 1; i >= 0; --i) {
    const u64 q = ring::nearest_ntt_prime(scale * scale / target, p.ring_degree, used);
    used.push_back(q);
    rescale[i] = q;
    scale = scale * scale / static_cast<double>(q);
  }
  p.base_primes.push_back(q0);
  p.base_primes.insert(p.base_primes.end(), rescale.begin(), rescale.end());
  validate(p);
  return p;
}

void validate(const CkksParams& p) {
  if (p.ring_degree < 8 || !std::has_single_bit(p.ring_degree)) {
    throw InvalidArgument("ring degree must be a power of two >= 8");
  }
  if (p.base_primes.empty()) throw InvalidArgument("modulus chain is empty");
  if (p.log2_scale < 10 || p.log2_scale > 60) throw InvalidArgument("log2 scale out of range");
  if (p.hamming_weight == 0 || p.hamming_weight > p.ring_degree) {
    throw InvalidArgument("hamming weight out of range");
  }
  if (!(p.sigma > 0)) throw InvalidArgument("sigma must be positive");
  for (std::size_t i = 1; i < p.base_primes.size(); ++i) {
    const double bits = std::log2(static_cast<double>(p.base_primes[i]));
    if (std::abs(bits - p.log2_scale) > 1.0) {
      throw InvalidArgument("rescaling prime " + std::to_string(i) + " is not within 2^+-1 of the scale");
    }
  }
  if (p.profile == SecurityProfile::kSecure128) {
    const double bound = secure128_log_qp_bound(p.ring_degree);
    if (bound == 0 || p.log2_qp() > bound) {
      throw InvalidArgument("log2(QP) = " + std::to_string(p.log2_qp()) +
                            " exceeds the 128-bit bound for N = " + std::to_string(p.ring_degree));
    }
  }
}

std::uint64_t params_hash(const CkksParams& p) {
  ByteWriter w;
  w.magic("hefine-ckks-params");
  w.u64(p.ring_degree);
  w.u32(static_cast<std::uint32_t>(p.base_primes.size()));
  w.words(p.base_primes);
  w.u32(static_cast<std::uint32_t>(p.special_primes.size()));
  w.words(p.special_primes);
  w.i32(p.log2_scale);
  w.u8(static_cast<std::uint8_t>(p.profile));
  w.u64(p.hamming_weight);
  w.f64(p.sigma);
  return hash64(w.view());
}

}  // namespace hefine::ckks
