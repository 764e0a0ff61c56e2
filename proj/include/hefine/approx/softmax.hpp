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

#include "hefine/approx/chebyshev.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/refresh.hpp"
#include "hefine/common/bytes.hpp"
#include "hefine/common/matrix.hpp"
#include "hefine/linalg/packing.hpp"

namespace hefine::approx {

/// Knobs of the encrypted softmax. Zero-valued derived fields are filled in
/// by plan_softmax from the class count.
struct SoftmaxConfig {
  /// Bound on row-centred logits: |z_j - mean(z)| <= B.
  double logit_bound = 8.0;
  std::size_t exp_degree = 31;
  /// Goldschmidt iterations; 0 derives the count from inverse_tolerance.
  std::size_t goldschmidt_iters = 0;
  /// Bound M on sum_j exp(z_j - mean); 0 derives it from B and c.
  double denom_bound = 0.0;
  /// Target relative error of the reciprocal at the worst-case denominator.
  double inverse_tolerance = 1e-4;

  bool operator==(const SoftmaxConfig&) const = default;
};

/// A config resolved for c classes, with the fitted exponential.
struct SoftmaxPlan {
  SoftmaxConfig config;
  std::size_t classes = 0;
  double logit_bound = 0.0;
  double denom_bound = 0.0;
  std::size_t iters = 0;
  /// exp(B t) on t in [-1, 1].
  ChebyshevPoly exp_poly;
};

/// max sum_j exp(u_j) over sum_j u_j = 0, |u_j| <= B (attained at a vertex
/// of the box: all but one coordinate at +-B).
double centred_exp_sum_bound(double bound, std::size_t classes);

/// Resolves derived fields: M = 1.05 * centred_exp_sum_bound(B, c) and the
/// Goldschmidt count reaching inverse_tolerance at x = c / M. Throws
/// InvalidArgument for B <= 0, c < 1 or M below the smallest possible sum.
SoftmaxPlan plan_softmax(const SoftmaxConfig& cfg, std::size_t classes);

/// Levels consumed without refreshes: centring 1, exponential
/// poly_depth, column mask 1, row sum 1, Goldschmidt k, final product 1.
std::size_t softmax_depth(const SoftmaxPlan& plan);

/// Row-wise softmax of row-major logits (one column tile, c <= C):
/// centre each row and divide by B, evaluate the exponential, mask padding
/// columns while folding in 1/M, sum the row, invert with Goldschmidt
/// (slots outside any row window are set to 1 so they invert harmlessly)
/// and multiply. Refreshes, when a refresher is given, happen before the
/// exponential and before Goldschmidt if levels run short.
linalg::PackedMatrix approx_softmax(const ckks::Context& ctx, const linalg::PackedMatrix& logits,
                                    const SoftmaxPlan& plan, const ckks::EvaluationKey& evk,
                                    const ckks::RotationKeySet& rot,
                                    ckks::Refresher* refresher = nullptr);

/// The same pipeline on plaintext rows (same polynomial, same iteration).
Matrix approx_softmax_plain(const Matrix& logits, const SoftmaxPlan& plan);
/// Reference softmax with max subtraction.
Matrix exact_softmax(const Matrix& logits);

void write(ByteWriter& w, const SoftmaxConfig& cfg);
SoftmaxConfig read_softmax_config(ByteReader& r);
/// Fingerprint of the serialized config; hospital and cloud compare it.
std::uint64_t config_hash(const SoftmaxConfig& cfg);

}  // namespace hefine::approx
