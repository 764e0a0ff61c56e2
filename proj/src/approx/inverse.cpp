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

#include "hefine/approx/inverse.hpp"

#include <cmath>

#include "hefine/ckks/evaluator.hpp"
#include "hefine/common/error.hpp"

namespace hefine::approx {

ckks::Ciphertext goldschmidt_core(const ckks::Context& ctx, const ckks::Ciphertext& x,
                                  std::size_t iters, const ckks::EvaluationKey& evk,
                                  ckks::Refresher* refresher) {
  if (iters == 0) throw InvalidArgument("goldschmidt: at least one iteration");
  const auto neg = ckks::negate(x);
  auto b = ckks::add_const(neg, 1.0);
  auto p = ckks::add_const(neg, 2.0);
  for (std::size_t i = 1; i < iters; ++i) {
    ckks::Ciphertext* live[] = {&b, &p};
    ckks::ensure_levels(live, 2, refresher);
    b = ckks::rescale(ctx, ckks::square(ctx, b, evk));
    const auto factor = ckks::add_const(b, 1.0);
    p = ckks::rescale(ctx, ckks::mult_ct(ctx, ckks::bring_to(ctx, p, b.level()), factor, evk));
  }
  return p;
}

ckks::Ciphertext goldschmidt_inverse(const ckks::Context& ctx, const ckks::Ciphertext& s,
                                     double bound, std::size_t iters,
                                     const ckks::EvaluationKey& evk, ckks::Refresher* refresher) {
  if (!(bound > 0)) throw InvalidArgument("goldschmidt_inverse: bound must be positive");
  ckks::Ciphertext in = s;
  ckks::Ciphertext* live[] = {&in};
  ckks::ensure_levels(live, iters + 2, refresher);
  const auto x = ckks::mult_const_to(ctx, in, 1.0 / bound, in.level() - 1);
  const auto p = goldschmidt_core(ctx, x, iters, evk, refresher);
  return ckks::mult_const_to(ctx, p, 1.0 / bound, p.level() - 1);
}

double goldschmidt_plain(double x, std::size_t iters) {
  if (iters == 0) throw InvalidArgument("goldschmidt: at least one iteration");
  double b = 1.0 - x, p = 2.0 - x;
  for (std::size_t i = 1; i < iters; ++i) {
    b *= b;
    p *= 1.0 + b;
  }
  return p;
}

std::size_t goldschmidt_iterations(double x_min, double tolerance) {
  if (!(x_min > 0 && x_min <= 1) || !(tolerance > 0 && tolerance < 1)) {
    throw InvalidArgument("goldschmidt_iterations: need x_min in (0, 1] and tolerance in (0, 1)");
  }
  std::size_t k = 1;
  // (1 - x)^(2^k) <= tol  <=>  2^k * log(1 - x) <= log(tol)
  const double per = std::log1p(-x_min);
  while (per > -INFINITY && std::ldexp(per, static_cast<int>(k)) > std::log(tolerance)) ++k;
  return k;
}

}  // namespace hefine::approx
