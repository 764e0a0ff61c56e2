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
#include <functional>
#include <vector>

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/refresh.hpp"

namespace hefine::approx {

/// p(x) = sum_j coeffs[j] * T_j(t) with t = (2x - lo - hi) / (hi - lo).
struct ChebyshevPoly {
  double lo = -1.0, hi = 1.0;
  std::vector<double> coeffs;
  /// sup |p - target| over 10^4 + 1 evenly spaced points, set by the fit.
  double max_error = 0.0;

  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  /// Clenshaw evaluation.
  double operator()(double x) const;
  /// Whether inputs need the affine map onto [-1, 1] (one extra level).
  bool needs_affine() const noexcept { return lo != -1.0 || hi != 1.0; }
};

/// Interpolant of `target` at the degree + 1 Chebyshev nodes of [lo, hi].
/// Throws InvalidArgument for lo >= hi, degree 0 or a non-finite sample.
ChebyshevPoly fit_chebyshev(const std::function<double(double)>& target, double lo, double hi,
                            std::size_t degree);

/// Levels consumed by eval_poly_enc: ceil(log2(degree + 1)) + 1, plus one
/// for the affine map when the interval is not [-1, 1].
std::size_t poly_depth(const ChebyshevPoly& p);

/// Slot-wise p(x) by baby-step giant-step over the Chebyshev basis: baby
/// steps T_1..T_m with m = 2^max(1, floor(D/2)), giant steps T_m, T_2m, ... by
/// doubling, and Chebyshev division at every giant step. The result sits
/// exactly poly_depth(p) levels below the input at the canonical scale.
/// With a refresher, an input that is too low is refreshed first. Inputs
/// on [-1, 1] polynomials must carry the canonical scale of their level.
ckks::Ciphertext eval_poly_enc(const ckks::Context& ctx, const ckks::Ciphertext& ct,
                               const ChebyshevPoly& p, const ckks::EvaluationKey& evk,
                               ckks::Refresher* refresher = nullptr);

}  // namespace hefine::approx
