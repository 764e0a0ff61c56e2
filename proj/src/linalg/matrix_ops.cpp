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

#include "hefine/linalg/matrix_ops.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "hefine/ckks/evaluator.hpp"
#include "hefine/common/error.hpp"

namespace hefine::linalg {
namespace {

using ckks::Ciphertext;

void require_row_major(const PackedMatrix& pm, const char* op) {
  if (pm.layout != Layout::kRowMajor) {
    throw InvalidArgument(std::string(op) + ": expected a row-major operand");
  }
  if (pm.cts.size() != pm.expected_tiles()) {
    throw InvalidArgument(std::string(op) + ": tile count does not match the plan");
  }
}

bool same_geometry(const PackingPlan& a, const PackingPlan& b) {
  return a.slot_count == b.slot_count && a.rows == b.rows && a.cols == b.cols &&
         a.padded_rows == b.padded_rows && a.padded_cols == b.padded_cols &&
         a.row_tiles == b.row_tiles && a.col_tiles == b.col_tiles;
}

void accumulate(std::optional<Ciphertext>& acc, Ciphertext term) {
  acc = acc ? ckks::add_ct(*acc, term) : std::move(term);
}

Ciphertext multiply_rescale(const ckks::Context& ctx, const Ciphertext& a, const Ciphertext& b,
                            const ckks::EvaluationKey& evk) {
  return ckks::rescale(ctx, ckks::mult_ct(ctx, a, b, evk));
}

/// Output plan of a product: A's row geometry, c columns.
PackingPlan product_plan(const PackingPlan& a, std::size_t c) {
  return plan_packing_with_width(a.rows, c, a.slot_count, a.padded_cols);
}

/// Segment sums of `prod` moved to column k: rotate-and-sum, keep the
/// first slot of each segment, shift right by k.
Ciphertext gather_column(const ckks::Context& ctx, const Ciphertext& prod, const PackingPlan& plan,
                         std::size_t k, const ckks::RotationKeySet& rot) {
  const auto summed = rotate_sum(ctx, prod, plan.padded_cols, rot);
  const auto mask = segment_mask(plan, 0, 1.0);
  const auto kept = ckks::mult_plain_to(ctx, summed, mask, summed.level() - 1);
  return k == 0 ? kept : ckks::rotate(ctx, kept, -static_cast<long>(k), rot);
}

template <typename ProductFn>
PackedMatrix matmul_impl(const ckks::Context& ctx, const PackedMatrix& a, std::size_t c,
                         const ckks::RotationKeySet& rot, ProductFn&& product) {
  const auto& pa = a.plan;
  if (c > pa.padded_cols) {
    throw InvalidArgument("matmul: " + std::to_string(c) + " output columns exceed the segment width " +
                          std::to_string(pa.padded_cols));
  }
  PackedMatrix out{Layout::kRowMajor, product_plan(pa, c), {}};
  for (std::size_t i = 0; i < pa.row_tiles; ++i) {
    std::optional<Ciphertext> acc;
    for (std::size_t k = 0; k < c; ++k) {
      std::optional<Ciphertext> prod;
      for (std::size_t t = 0; t < pa.col_tiles; ++t) accumulate(prod, product(i, t, k));
      accumulate(acc, gather_column(ctx, *prod, pa, k, rot));
    }
    out.cts.push_back(std::move(*acc));
  }
  return out;
}

}  // namespace

Ciphertext rotate_sum(const ckks::Context& ctx, const Ciphertext& ct, std::size_t width,
                      const ckks::RotationKeySet& rot) {
  Ciphertext acc = ct;
  for (std::size_t s = 1; s < width; s <<= 1) {
    acc = ckks::add_ct(acc, ckks::rotate(ctx, acc, static_cast<long>(s), rot));
  }
  return acc;
}

Ciphertext broadcast_right(const ckks::Context& ctx, const Ciphertext& ct, std::size_t width,
                           const ckks::RotationKeySet& rot) {
  Ciphertext acc = ct;
  for (std::size_t s = 1; s < width; s <<= 1) {
    acc = ckks::add_ct(acc, ckks::rotate(ctx, acc, -static_cast<long>(s), rot));
  }
  return acc;
}

std::vector<double> segment_mask(const PackingPlan& plan, std::size_t offset, double value) {
  std::vector<double> m(plan.slot_count, 0.0);
  for (std::size_t b = 0; b < plan.padded_rows; ++b) m[b * plan.padded_cols + offset] = value;
  return m;
}

PackedMatrix matmul(const ckks::Context& ctx, const PackedMatrix& a, const PackedMatrix& b,
                    const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot) {
  require_row_major(a, "matmul");
  if (b.layout != Layout::kColumnReplicated || b.cts.size() != b.expected_tiles()) {
    throw InvalidArgument("matmul: right operand must be column-replicated");
  }
  if (b.rows() != a.cols()) {
    throw InvalidArgument("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                          std::to_string(b.rows()) + " differ");
  }
  if (b.plan.padded_cols != a.plan.padded_cols || b.plan.col_tiles != a.plan.col_tiles) {
    throw InvalidArgument("matmul: right operand was packed against a different segment width");
  }
  const std::size_t m = std::min(a.level(), b.level());
  if (m <= kMatmulDepth) throw LevelExhausted("matmul: needs " + std::to_string(kMatmulDepth) + " levels");
  std::vector<Ciphertext> a_at(a.cts.size()), b_at(b.cts.size());
  for (std::size_t i = 0; i < a.cts.size(); ++i) a_at[i] = ckks::bring_to(ctx, a.cts[i], m);
  for (std::size_t i = 0; i < b.cts.size(); ++i) b_at[i] = ckks::bring_to(ctx, b.cts[i], m);
  const std::size_t ct = a.plan.col_tiles;
  return matmul_impl(ctx, a, b.cols(), rot, [&](std::size_t i, std::size_t t, std::size_t k) {
    return multiply_rescale(ctx, a_at[i * ct + t], b_at[k * ct + t], evk);
  });
}

PackedMatrix matmul(const ckks::Context& ctx, const PackedMatrix& a, const Matrix& b,
                    const ckks::RotationKeySet& rot) {
  require_row_major(a, "matmul");
  if (b.rows != a.cols()) {
    throw InvalidArgument("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                          std::to_string(b.rows) + " differ");
  }
  if (a.level() <= kMatmulDepth) throw LevelExhausted("matmul: needs " + std::to_string(kMatmulDepth) + " levels");
  const auto pb = column_replicated_plan(b.rows, b.cols, a.plan);
  const std::size_t ct = a.plan.col_tiles;
  return matmul_impl(ctx, a, b.cols, rot, [&](std::size_t i, std::size_t t, std::size_t k) {
    const auto col = column_replicated_tile(b, pb, k, t);
    const auto& x = a.cts[i * ct + t];
    return ckks::mult_plain_to(ctx, x, col, x.level() - 1);
  });
}

PackedMatrix matmul_At_B(const ckks::Context& ctx, const PackedMatrix& a, const PackedMatrix& b,
                         const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
                         double factor) {
  require_row_major(a, "matmul_At_B");
  require_row_major(b, "matmul_At_B");
  const auto& pa = a.plan;
  const auto& pb = b.plan;
  if (pa.rows != pb.rows) {
    throw InvalidArgument("matmul_At_B: row counts " + std::to_string(pa.rows) + " and " +
                          std::to_string(pb.rows) + " differ");
  }
  if (pa.padded_cols != pb.padded_cols || pa.padded_rows != pb.padded_rows ||
      pa.row_tiles != pb.row_tiles || pb.col_tiles != 1) {
    throw InvalidArgument("matmul_At_B: operands were packed with different geometry");
  }
  if (b.level() < 2 || std::min(a.level(), b.level() - 1) < 2) {
    throw LevelExhausted("matmul_At_B: needs " + std::to_string(kMatmulAtBDepth) + " levels");
  }
  const std::size_t m = std::min(a.level(), b.level() - 1);
  std::vector<Ciphertext> a_at(a.cts.size());
  for (std::size_t i = 0; i < a.cts.size(); ++i) a_at[i] = ckks::bring_to(ctx, a.cts[i], m);

  PackedMatrix out{Layout::kColumnReplicated, column_replicated_plan(pa.cols, pb.cols, pa), {}};
  out.cts.resize(out.expected_tiles());
  for (std::size_t k = 0; k < pb.cols; ++k) {
    std::vector<std::optional<Ciphertext>> acc(pa.col_tiles);
    const auto mask = segment_mask(pb, k, factor);
    for (std::size_t i = 0; i < pa.row_tiles; ++i) {
      auto e = ckks::mult_plain_to(ctx, b.cts[i], mask, b.level() - 1);
      if (k) e = ckks::rotate(ctx, e, static_cast<long>(k), rot);
      e = ckks::bring_to(ctx, broadcast_right(ctx, e, pb.padded_cols, rot), m);
      for (std::size_t t = 0; t < pa.col_tiles; ++t) {
        accumulate(acc[t], multiply_rescale(ctx, a_at[i * pa.col_tiles + t], e, evk));
      }
    }
    for (std::size_t t = 0; t < pa.col_tiles; ++t) {
      Ciphertext sum = std::move(*acc[t]);
      for (std::size_t s = pa.padded_cols; s < pa.slot_count; s <<= 1) {
        sum = ckks::add_ct(sum, ckks::rotate(ctx, sum, static_cast<long>(s), rot));
      }
      out.cts[k * pa.col_tiles + t] = std::move(sum);
    }
  }
  return out;
}

PackedMatrix row_reduce_sum(const ckks::Context& ctx, const PackedMatrix& pm,
                            const ckks::RotationKeySet& rot, double factor) {
  require_row_major(pm, "row_reduce_sum");
  const auto& p = pm.plan;
  if (pm.level() <= kRowReduceDepth) throw LevelExhausted("row_reduce_sum: needs one level");
  const auto mask = segment_mask(p, 0, factor);
  PackedMatrix out{Layout::kRowMajor, p, {}};
  out.cts.reserve(pm.cts.size());
  for (std::size_t i = 0; i < p.row_tiles; ++i) {
    std::optional<Ciphertext> row;
    for (std::size_t t = 0; t < p.col_tiles; ++t) accumulate(row, pm.cts[i * p.col_tiles + t]);
    auto summed = rotate_sum(ctx, *row, p.padded_cols, rot);
    summed = ckks::mult_plain_to(ctx, summed, mask, summed.level() - 1);
    summed = broadcast_right(ctx, summed, p.padded_cols, rot);
    for (std::size_t t = 0; t < p.col_tiles; ++t) out.cts.push_back(summed);
  }
  return out;
}

PackedMatrix scalar_mult(const ckks::Context& ctx, const PackedMatrix& pm, double k) {
  if (pm.level() <= kScalarMultDepth) throw LevelExhausted("scalar_mult: needs one level");
  return scalar_mult(ctx, pm, k, pm.level() - 1);
}

PackedMatrix scalar_mult(const ckks::Context& ctx, const PackedMatrix& pm, double k,
                         std::size_t level) {
  PackedMatrix out{pm.layout, pm.plan, {}};
  out.cts.reserve(pm.cts.size());
  for (const auto& ct : pm.cts) out.cts.push_back(ckks::mult_const_to(ctx, ct, k, level));
  return out;
}

PackedMatrix bring_to(const ckks::Context& ctx, const PackedMatrix& pm, std::size_t level) {
  PackedMatrix out{pm.layout, pm.plan, {}};
  out.cts.reserve(pm.cts.size());
  for (const auto& ct : pm.cts) out.cts.push_back(ckks::bring_to(ctx, ct, level));
  return out;
}

namespace {

template <typename Op>
PackedMatrix elementwise(const PackedMatrix& a, const PackedMatrix& b, const char* name, Op op) {
  if (a.layout != b.layout || !same_geometry(a.plan, b.plan) || a.cts.size() != b.cts.size()) {
    throw InvalidArgument(std::string(name) + ": operands differ in layout or shape");
  }
  PackedMatrix out{a.layout, a.plan, {}};
  out.cts.reserve(a.cts.size());
  for (std::size_t i = 0; i < a.cts.size(); ++i) out.cts.push_back(op(a.cts[i], b.cts[i]));
  return out;
}

}  // namespace

PackedMatrix matrix_add(const PackedMatrix& a, const PackedMatrix& b) {
  return elementwise(a, b, "matrix_add", ckks::add_ct);
}

PackedMatrix matrix_sub(const PackedMatrix& a, const PackedMatrix& b) {
  return elementwise(a, b, "matrix_sub", ckks::sub_ct);
}

}  // namespace hefine::linalg
