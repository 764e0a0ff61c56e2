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

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/refresh.hpp"

namespace hefine::approx {

/// Goldschmidt iteration for 1/x on x in (0, 2):
///   b_0 = 1 - x,  P_1 = 2 - x,  b_i = b_{i-1}^2,  P_{i+1} = P_i (1 + b_i).
/// P_k = (1 - b_0^(2^k)) / x, so the relative error is |1 - x|^(2^k). The
/// squaring chain runs one level ahead of the product chain, so the depth
/// is k for k >= 2 (P_1 needs no multiplication).
/// A refresher, when given, is consulted before each iteration.
ckks::Ciphertext goldschmidt_core(const ckks::Context& ctx, const ckks::Ciphertext& x,
                                  std::size_t iters, const ckks::EvaluationKey& evk,
                                  ckks::Refresher* refresher = nullptr);

/// 1/s for s in (0, M]: x = s / M, then (1/M) * goldschmidt_core(x, k).
/// Depth k + 2.
ckks::Ciphertext goldschmidt_inverse(const ckks::Context& ctx, const ckks::Ciphertext& s,
                                     double bound, std::size_t iters,
                                     const ckks::EvaluationKey& evk,
                                     ckks::Refresher* refresher = nullptr);

/// The same recurrence in plaintext.
double goldschmidt_plain(double x, std::size_t iters);

/// Smallest k with (1 - x_min)^(2^k) <= tolerance, for x_min in (0, 1].
std::size_t goldschmidt_iterations(double x_min, double tolerance);

}  // namespace hefine::approx
