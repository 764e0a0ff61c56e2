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
#include <vector>

#include "hefine/common/prng.hpp"
#include "hefine/ring/ring_poly.hpp"

namespace hefine::ring {

inline constexpr double kDefaultSigma = 3.2;

// Signed coefficient samplers. The ring versions below reduce these into
// every active prime, so one draw yields a consistent RNS representation.

/// Exactly `hamming_weight` coefficients set to +-1, positions and signs
/// uniform. Throws InvalidArgument if hamming_weight > n.
std::vector<std::int64_t> ternary_coeffs(std::size_t n, std::size_t hamming_weight, Prng& rng);

/// Rounded continuous Gaussian, redrawn outside [-6 sigma, 6 sigma].
std::vector<std::int64_t> gaussian_coeffs(std::size_t n, double sigma, Prng& rng);

RingPoly sample_ternary(const BasisPtr& basis, std::size_t level, std::size_t hamming_weight,
                        Prng& rng, bool extended = false);
RingPoly sample_gaussian(const BasisPtr& basis, std::size_t level, double sigma, Prng& rng,
                         bool extended = false);
/// Independent uniform residues per prime. The distribution is the same in
/// either domain, so the caller picks the one it needs.
RingPoly sample_uniform(const BasisPtr& basis, std::size_t level, Prng& rng,
                        Domain domain = Domain::kNtt, bool extended = false);

}  // namespace hefine::ring
