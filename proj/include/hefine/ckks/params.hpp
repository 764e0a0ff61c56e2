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
#include <string>
#include <string_view>
#include <vector>

#include "hefine/ring/modulus.hpp"

namespace hefine::ckks {

using ring::u64;

enum class SecurityProfile : std::uint8_t {
  /// Small ring, long chain; fast enough for CI and NOT secure.
  kTest = 0,
  /// N = 2^15 with log2(QP) under the 128-bit HE-standard bound.
  kSecure128 = 1,
};

std::string_view profile_name(SecurityProfile p);
/// Parses "test" / "secure128"; throws InvalidArgument otherwise.
SecurityProfile parse_profile(std::string_view name);

/// Scheme parameters shared by both parties. Everything that influences a
/// ciphertext's bytes or the noise distribution is part of the hash.
struct CkksParams {
  std::size_t ring_degree = 0;
  /// q_0 (decryption prime) first, then the rescaling primes in chain order.
  std::vector<u64> base_primes;
  /// Key-switching primes; they never appear in ciphertexts at rest.
  std::vector<u64> special_primes;
  /// log2 of the scale at the top level.
  int log2_scale = 40;
  SecurityProfile profile = SecurityProfile::kTest;
  std::size_t hamming_weight = 0;
  double sigma = 3.2;

  std::size_t slot_count() const noexcept { return ring_degree / 2; }
  std::size_t max_level() const noexcept { return base_primes.size(); }
  /// log2 of the product of every base and special prime.
  double log2_qp() const;
};

/// Builds one of the two shipped parameter sets. Prime search is
/// deterministic, so both parties derive identical chains from the profile.
CkksParams make_params(SecurityProfile profile);

/// Largest log2(QP) allowed for 128-bit security with ternary secrets, by
/// ring degree (HE standard table); 0 for degrees outside the table.
double secure128_log_qp_bound(std::size_t ring_degree);

/// Throws InvalidArgument for malformed parameters and for secure128 sets
/// that exceed the security bound.
void validate(const CkksParams& params);

/// 8-byte BLAKE2b fingerprint of the canonical parameter encoding.
std::uint64_t params_hash(const CkksParams& params);

}  // namespace hefine::ckks
