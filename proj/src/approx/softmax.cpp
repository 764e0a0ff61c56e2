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

#include "hefine/approx/softmax.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "hefine/approx/inverse.hpp"
#include "hefine/ckks/encoder.hpp"
#include "hefine/ckks/evaluator.hpp"
#include "hefine/common/error.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/linalg/matrix_ops.hpp"

namespace hefine::approx {
namespace {

using ckks::Ciphertext;
using linalg::PackedMatrix;

constexpr double kDenominatorMargin = 1.05;

struct RowMasks {
  std::vector<double> mean, valid, first, outside;
};

RowMasks build_masks(const linalg::PackingPlan& p, std::size_t classes, std::size_t window,
                     const SoftmaxPlan& plan) {
  RowMasks m;
  m.mean = linalg::segment_mask(p, 0, 1.0 / (static_cast<double>(classes) * plan.logit_bound));
  m.first = linalg::segment_mask(p, 0, 1.0);
  m.valid.assign(p.slot_count, 0.0);
  m.outside.assign(p.slot_count, 1.0);
  for (std::size_t b = 0; b < p.padded_rows; ++b) {
    for (std::size_t j = 0; j < classes; ++j) m.valid[b * p.padded_cols + j] = 1.0 / plan.denom_bound;
    for (std::size_t j = 0; j < window; ++j) m.outside[b * p.padded_cols + j] = 0.0;
  }
  return m;
}

}  // namespace

double centred_exp_sum_bound(double bound, std::size_t classes) {
  if (!(bound > 0) || classes == 0) throw InvalidArgument("softmax: need B > 0 and c >= 1");
  const double c = static_cast<double>(classes);
  double best = 0;
  for (std::size_t up = 0; up < classes; ++up) {
    const double u = static_cast<double>(up);
    const double free = (c - 1.0 - 2.0 * u) * bound;
    if (std::abs(free) > bound * (1 + 1e-12)) continue;
    best = std::max(best, u * std::exp(bound) + (c - 1.0 - u) * std::exp(-bound) + std::exp(free));
  }
  return best;
}

SoftmaxPlan plan_softmax(const SoftmaxConfig& cfg, std::size_t classes) {
  if (cfg.exp_degree == 0) throw InvalidArgument("softmax: exp degree must be at least 1");
  SoftmaxPlan plan;
  plan.config = cfg;
  plan.classes = classes;
  plan.logit_bound = cfg.logit_bound;
  const double sum_bound = centred_exp_sum_bound(cfg.logit_bound, classes);
  plan.denom_bound = cfg.denom_bound > 0 ? cfg.denom_bound : kDenominatorMargin * sum_bound;
  if (plan.denom_bound < 0.5 * sum_bound) {
    throw InvalidArgument("softmax: denominator bound too small for the logit bound");
  }
  const double x_min = std::min(1.0, static_cast<double>(classes) / plan.denom_bound);
  plan.iters = cfg.goldschmidt_iters ? cfg.goldschmidt_iters
                                     : goldschmidt_iterations(x_min, cfg.inverse_tolerance);
  const double b = cfg.logit_bound;
  plan.exp_poly = fit_chebyshev([b](double t) { return std::exp(b * t); }, -1.0, 1.0, cfg.exp_degree);
  return plan;
}

std::size_t softmax_depth(const SoftmaxPlan& plan) {
  const std::size_t gold = plan.iters >= 2 ? plan.iters : 0;
  return 1 + poly_depth(plan.exp_poly) + 1 + 1 + gold + 1;
}

PackedMatrix approx_softmax(const ckks::Context& ctx, const PackedMatrix& logits,
                            const SoftmaxPlan& plan, const ckks::EvaluationKey& evk,
                            const ckks::RotationKeySet& rot, ckks::Refresher* refresher) {
  const auto& p = logits.plan;
  if (logits.layout != linalg::Layout::kRowMajor || p.col_tiles != 1 ||
      logits.cts.size() != p.row_tiles) {
    throw InvalidArgument("approx_softmax: logits must be row-major in one column tile");
  }
  if (p.cols != plan.classes) {
    throw InvalidArgument("approx_softmax: plan is for " + std::to_string(plan.classes) +
                          " classes, logits have " + std::to_string(p.cols));
  }
  const std::size_t window = std::bit_ceil(plan.classes);
  const auto masks = build_masks(p, plan.classes, window, plan);

  std::vector<Ciphertext> z = logits.cts;
  {
    std::vector<Ciphertext*> live;
    for (auto& ct : z) live.push_back(&ct);
    ckks::ensure_levels(live, 3 + poly_depth(plan.exp_poly), refresher);
  }

  std::vector<Ciphertext> numer, denom;
  for (const auto& zt : z) {
    const std::size_t l = zt.level();
    auto mean = ckks::mult_plain_to(ctx, linalg::rotate_sum(ctx, zt, window, rot), masks.mean, l - 1);
    mean = linalg::broadcast_right(ctx, mean, window, rot);
    const auto u = ckks::sub_ct(ckks::mult_const_to(ctx, zt, 1.0 / plan.logit_bound, l - 1), mean);

    const auto e = eval_poly_enc(ctx, u, plan.exp_poly, evk);
    auto en = ckks::mult_plain_to(ctx, e, masks.valid, e.level() - 1);
    auto s = ckks::mult_plain_to(ctx, linalg::rotate_sum(ctx, en, window, rot), masks.first, en.level() - 1);
    s = linalg::broadcast_right(ctx, s, window, rot);
    s = ckks::add_plain(s, ckks::encode(ctx, masks.outside, s.scale, s.level()));
    numer.push_back(ckks::bring_to(ctx, en, s.level()));
    denom.push_back(std::move(s));
  }

  const std::size_t gold = plan.iters >= 2 ? plan.iters : 0;
  {
    std::vector<Ciphertext*> live;
    for (auto& ct : numer) live.push_back(&ct);
    for (auto& ct : denom) live.push_back(&ct);
    ckks::ensure_levels(live, gold + 1, refresher);
  }

  PackedMatrix out{linalg::Layout::kRowMajor, p, {}};
  for (std::size_t i = 0; i < numer.size(); ++i) {
    const auto inv = goldschmidt_core(ctx, denom[i], plan.iters, evk);
    const std::size_t l = std::min(inv.level(), numer[i].level());
    out.cts.push_back(ckks::rescale(
        ctx, ckks::mult_ct(ctx, ckks::bring_to(ctx, numer[i], l), ckks::bring_to(ctx, inv, l), evk)));
  }
  return out;
}

Matrix approx_softmax_plain(const Matrix& logits, const SoftmaxPlan& plan) {
  if (logits.cols != plan.classes) throw InvalidArgument("approx_softmax_plain: class count differs");
  Matrix out(logits.rows, logits.cols);
  const double c = static_cast<double>(plan.classes);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    double mean = 0;
    for (double v : logits.row(i)) mean += v;
    mean /= c;
    double sum = 0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      out(i, j) = plan.exp_poly((logits(i, j) - mean) / plan.logit_bound) / plan.denom_bound;
      sum += out(i, j);
    }
    const double inv = goldschmidt_plain(sum, plan.iters);
    for (auto& v : out.row(i)) v *= inv;
  }
  return out;
}

Matrix exact_softmax(const Matrix& logits) {
  Matrix out(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0;
    for (std::size_t j = 0; j < logits.cols; ++j) sum += out(i, j) = std::exp(row[j] - mx);
    for (auto& v : out.row(i)) v /= sum;
  }
  return out;
}

void write(ByteWriter& w, const SoftmaxConfig& cfg) {
  w.f64(cfg.logit_bound);
  w.u32(static_cast<std::uint32_t>(cfg.exp_degree));
  w.u32(static_cast<std::uint32_t>(cfg.goldschmidt_iters));
  w.f64(cfg.denom_bound);
  w.f64(cfg.inverse_tolerance);
}

SoftmaxConfig read_softmax_config(ByteReader& r) {
  SoftmaxConfig cfg;
  cfg.logit_bound = r.f64();
  cfg.exp_degree = r.u32();
  cfg.goldschmidt_iters = r.u32();
  cfg.denom_bound = r.f64();
  cfg.inverse_tolerance = r.f64();
  if (!(cfg.logit_bound > 0) || cfg.exp_degree == 0 || cfg.exp_degree > 1023 ||
      !(cfg.denom_bound >= 0) || !(cfg.inverse_tolerance > 0 && cfg.inverse_tolerance < 1)) {
    throw FormatError("softmax config: field out of range");
  }
  return cfg;
}

std::uint64_t config_hash(const SoftmaxConfig& cfg) {
  ByteWriter w;
  write(w, cfg);
  return hash64(w.view());
}

}  // namespace hefine::approx
