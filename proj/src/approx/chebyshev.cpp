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

#include "hefine/approx/chebyshev.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "hefine/ckks/evaluator.hpp"
#include "hefine/common/error.hpp"

namespace hefine::approx {
namespace {

using ckks::Ciphertext;

constexpr std::size_t kErrorSamples = 10001;

std::size_t log2_ceil(std::size_t n) { return static_cast<std::size_t>(std::bit_width(n - 1)); }

class BsgsEvaluator {
 public:
  BsgsEvaluator(const ckks::Context& ctx, const ckks::EvaluationKey& evk, Ciphertext t1,
                std::size_t depth)
      : ctx_(ctx), evk_(evk) {
    baby_log_ = std::max<std::size_t>(1, depth / 2);
    const std::size_t m = std::size_t{1} << baby_log_;
    leaf_level_ = t1.level() - baby_log_ - 1;
    // T_m itself is only needed as the first giant step.
    const std::size_t top = depth > baby_log_ ? m : m - 1;
    basis_.resize(top + 1);
    basis_[1] = std::move(t1);
    for (std::size_t j = 2; j <= top; ++j) {
      basis_[j] = (j % 2 == 0) ? double_square_minus_one(basis_[j / 2])
                               : double_product_minus(basis_[j / 2], basis_[j / 2 + 1], basis_[1]);
    }
    if (depth > baby_log_) giants_.push_back(basis_[m]);
    while (giants_.size() < depth - baby_log_) giants_.push_back(double_square_minus_one(giants_.back()));
  }

  /// sum_j cs[j] T_j for cs.size() = m * 2^i.
  Ciphertext eval(std::span<const double> cs) const {
    const std::size_t m = std::size_t{1} << baby_log_;
    if (cs.size() == m) return leaf(cs);
    const std::size_t half = cs.size() / 2;
    std::vector<double> q(half), r(half);
    q[0] = cs[half];
    for (std::size_t k = 1; k < half; ++k) q[k] = 2.0 * cs[half + k];
    r[0] = cs[0];
    for (std::size_t j = 1; j < half; ++j) r[j] = cs[j] - cs[2 * half - j];

    const Ciphertext qe = eval(q), re = eval(r);
    const Ciphertext& giant = giants_[static_cast<std::size_t>(std::countr_zero(half / m))];
    const std::size_t level = std::min(giant.level(), qe.level());
    const auto prod = ckks::rescale(
        ctx_, ckks::mult_ct(ctx_, ckks::bring_to(ctx_, giant, level), ckks::bring_to(ctx_, qe, level), evk_));
    return ckks::add_ct(prod, ckks::bring_to(ctx_, re, prod.level()));
  }

 private:
  Ciphertext leaf(std::span<const double> cs) const {
    std::optional<Ciphertext> acc;
    for (std::size_t j = 1; j < cs.size(); ++j) {
      if (cs[j] == 0.0) continue;
      auto term = ckks::mult_const_to(ctx_, basis_[j], cs[j], leaf_level_);
      acc = acc ? ckks::add_ct(*acc, term) : std::move(term);
    }
    if (!acc) acc = ckks::mult_const_to(ctx_, basis_[1], 0.0, leaf_level_);
    return ckks::add_const(*acc, cs[0]);
  }

  // 2 a^2 - 1
  Ciphertext double_square_minus_one(const Ciphertext& a) const {
    const auto sq = ckks::rescale(ctx_, ckks::square(ctx_, a, evk_));
    return ckks::add_const(ckks::mult_int(sq, 2), -1.0);
  }

  // 2 a b - c
  Ciphertext double_product_minus(const Ciphertext& a, const Ciphertext& b, const Ciphertext& c) const {
    const std::size_t level = std::min(a.level(), b.level());
    const auto prod = ckks::rescale(
        ctx_, ckks::mult_ct(ctx_, ckks::bring_to(ctx_, a, level), ckks::bring_to(ctx_, b, level), evk_));
    return ckks::sub_ct(ckks::mult_int(prod, 2), ckks::bring_to(ctx_, c, prod.level()));
  }

  const ckks::Context& ctx_;
  const ckks::EvaluationKey& evk_;
  std::size_t baby_log_ = 0;
  std::size_t leaf_level_ = 0;
  std::vector<Ciphertext> basis_;   // T_0 unused, then T_1 upwards
  std::vector<Ciphertext> giants_;  // T_m, T_2m, T_4m, ...
};

}  // namespace

double ChebyshevPoly::operator()(double x) const {
  const double t = (2.0 * x - lo - hi) / (hi - lo);
  double b1 = 0, b2 = 0;
  for (std::size_t j = coeffs.size(); j-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + coeffs[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (coeffs.empty() ? 0.0 : coeffs[0]);
}

ChebyshevPoly fit_chebyshev(const std::function<double(double)>& target, double lo, double hi,
                            std::size_t degree) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidArgument("fit_chebyshev: interval must satisfy lo < hi");
  }
  if (degree == 0) throw InvalidArgument("fit_chebyshev: degree must be at least 1");
  const std::size_t n = degree + 1;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  std::vector<double> samples(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    samples[k] = target(mid + half * std::cos(theta));
    if (!std::isfinite(samples[k])) {
      throw InvalidArgument("fit_chebyshev: target is not finite at a node");
    }
  }
  ChebyshevPoly p;
  p.lo = lo;
  p.hi = hi;
  p.coeffs.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < n; ++k) {
      s += samples[k] * std::cos(std::numbers::pi * static_cast<double>(j) * (static_cast<double>(k) + 0.5) /
                                 static_cast<double>(n));
    }
    p.coeffs[j] = (j == 0 ? 1.0 : 2.0) * s / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < kErrorSamples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kErrorSamples - 1);
    const double y = target(x);
    if (!std::isfinite(y)) throw InvalidArgument("fit_chebyshev: target is not finite on the interval");
    p.max_error = std::max(p.max_error, std::abs(p(x) - y));
  }
  return p;
}

std::size_t poly_depth(const ChebyshevPoly& p) {
  if (p.degree() == 0) throw InvalidArgument("poly_depth: degree must be at least 1");
  return log2_ceil(p.degree() + 1) + 1 + (p.needs_affine() ? 1 : 0);
}

Ciphertext eval_poly_enc(const ckks::Context& ctx, const Ciphertext& ct, const ChebyshevPoly& p,
                         const ckks::EvaluationKey& evk, ckks::Refresher* refresher) {
  const std::size_t depth = poly_depth(p);
  Ciphertext x = ct;
  Ciphertext* xs[] = {&x};
  ckks::ensure_levels(xs, depth, refresher);

  if (p.needs_affine()) {
    const double alpha = 2.0 / (p.hi - p.lo), beta = -(p.hi + p.lo) / (p.hi - p.lo);
    x = ckks::add_const(ckks::mult_const_to(ctx, x, alpha, x.level() - 1), beta);
  } else if (x.scale != ctx.scale_at(x.level())) {
    throw ScaleMismatch("eval_poly_enc: input must carry the canonical scale of its level");
  }
  const std::size_t d = log2_ceil(p.degree() + 1);
  std::vector<double> cs(std::size_t{1} << d, 0.0);
  std::copy(p.coeffs.begin(), p.coeffs.end(), cs.begin());
  const BsgsEvaluator bsgs(ctx, evk, std::move(x), d);
  return bsgs.eval(cs);
}

}  // namespace hefine::approx
