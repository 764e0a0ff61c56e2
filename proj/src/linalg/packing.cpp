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

#include "hefine/linalg/packing.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "hefine/ckks/encoder.hpp"
#include "hefine/ckks/evaluator.hpp"
#include "hefine/ckks/serialize.hpp"
#include "hefine/common/error.hpp"

namespace hefine::linalg {
namespace {

std::vector<long> plan_steps(std::size_t width, std::size_t slots) {
  std::vector<long> steps;
  for (std::size_t s = 1; s <= width && s <= slots / 2; s <<= 1) {
    steps.push_back(ckks::normalize_step(static_cast<long>(s), slots));
    steps.push_back(ckks::normalize_step(-static_cast<long>(s), slots));
  }
  for (std::size_t s = width; s <= slots / 2; s <<= 1) {
    steps.push_back(ckks::normalize_step(static_cast<long>(s), slots));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

void check_shape(const Matrix& m, const PackingPlan& plan) {
  if (m.rows != plan.rows || m.cols != plan.cols) {
    throw InvalidArgument("pack: matrix is " + std::to_string(m.rows) + "x" +
                          std::to_string(m.cols) + ", plan expects " + std::to_string(plan.rows) +
                          "x" + std::to_string(plan.cols));
  }
}

std::size_t resolve_level(const ckks::Context& ctx, std::size_t level) {
  if (level == 0) return ctx.max_level();
  if (level > ctx.max_level()) throw InvalidArgument("pack: level above the top of the chain");
  return level;
}

std::vector<double> tile_values(const Matrix& m, const PackingPlan& plan, Layout layout,
                                std::size_t index) {
  if (layout == Layout::kRowMajor) {
    return row_major_tile(m, plan, index / plan.col_tiles, index % plan.col_tiles);
  }
  return column_replicated_tile(m, plan, index / plan.col_tiles, index % plan.col_tiles);
}

}  // namespace

PackingPlan plan_packing(std::size_t rows, std::size_t cols, std::size_t slot_count) {
  return plan_packing_with_width(rows, cols, slot_count, 1);
}

PackingPlan plan_packing_with_width(std::size_t rows, std::size_t cols, std::size_t slot_count,
                                    std::size_t min_width) {
  if (rows == 0 || cols == 0) throw InvalidArgument("plan_packing: empty matrix");
  if (slot_count == 0 || !std::has_single_bit(slot_count)) {
    throw InvalidArgument("plan_packing: slot count must be a power of two");
  }
  PackingPlan p;
  p.slot_count = slot_count;
  p.rows = rows;
  p.cols = cols;
  const std::size_t width = std::bit_ceil(std::max(cols, min_width));
  p.padded_cols = std::min(width, slot_count);
  p.col_tiles = (cols + p.padded_cols - 1) / p.padded_cols;
  p.padded_rows = std::min(std::bit_ceil(rows), slot_count / p.padded_cols);
  p.row_tiles = (rows + p.padded_rows - 1) / p.padded_rows;
  p.rotation_steps = plan_steps(p.padded_cols, slot_count);
  return p;
}

PackingPlan column_replicated_plan(std::size_t d, std::size_t c, const PackingPlan& partner) {
  if (d != partner.cols) {
    throw InvalidArgument("column_replicated_plan: " + std::to_string(d) +
                          " rows against a partner with " + std::to_string(partner.cols) +
                          " columns");
  }
  if (c == 0) throw InvalidArgument("column_replicated_plan: empty matrix");
  PackingPlan p = partner;
  p.rows = d;
  p.cols = c;
  p.padded_rows = p.blocks();
  p.row_tiles = 1;
  return p;
}

std::size_t PackedMatrix::expected_tiles() const noexcept {
  return layout == Layout::kRowMajor ? plan.tile_count() : plan.cols * plan.col_tiles;
}

std::vector<double> row_major_tile(const Matrix& m, const PackingPlan& plan, std::size_t i,
                                   std::size_t t) {
  std::vector<double> v(plan.slot_count, 0.0);
  const std::size_t r0 = i * plan.padded_rows, c0 = t * plan.padded_cols;
  const std::size_t r1 = std::min(m.rows, r0 + plan.padded_rows);
  const std::size_t c1 = std::min(m.cols, c0 + plan.padded_cols);
  for (std::size_t r = r0; r < r1; ++r)
    for (std::size_t j = c0; j < c1; ++j) v[(r - r0) * plan.padded_cols + (j - c0)] = m(r, j);
  return v;
}

std::vector<double> column_replicated_tile(const Matrix& m, const PackingPlan& plan,
                                           std::size_t k, std::size_t t) {
  std::vector<double> v(plan.slot_count, 0.0);
  const std::size_t C = plan.padded_cols;
  const std::size_t j0 = t * C, j1 = std::min(m.rows, j0 + C);
  for (std::size_t b = 0; b < plan.blocks(); ++b)
    for (std::size_t j = j0; j < j1; ++j) v[b * C + (j - j0)] = m(j, k);
  return v;
}

PackedMatrix pack(const ckks::Context& ctx, const Matrix& m, const PackingPlan& plan,
                  const ckks::PublicKey& pk, Prng& rng, std::size_t level) {
  check_shape(m, plan);
  const std::size_t l = resolve_level(ctx, level);
  PackedMatrix pm{Layout::kRowMajor, plan, {}};
  for (std::size_t idx = 0; idx < pm.expected_tiles(); ++idx) {
    const auto v = tile_values(m, plan, pm.layout, idx);
    pm.cts.push_back(ckks::encrypt_pk(ctx, ckks::encode(ctx, v, ctx.scale_at(l), l), pk, rng));
  }
  return pm;
}

PackedMatrix pack_column_replicated(const ckks::Context& ctx, const Matrix& m,
                                    const PackingPlan& plan, const ckks::PublicKey& pk, Prng& rng,
                                    std::size_t level) {
  check_shape(m, plan);
  const std::size_t l = resolve_level(ctx, level);
  PackedMatrix pm{Layout::kColumnReplicated, plan, {}};
  for (std::size_t idx = 0; idx < pm.expected_tiles(); ++idx) {
    const auto v = tile_values(m, plan, pm.layout, idx);
    pm.cts.push_back(ckks::encrypt_pk(ctx, ckks::encode(ctx, v, ctx.scale_at(l), l), pk, rng));
  }
  return pm;
}

PackedMatrix pack_sk(const ckks::Context& ctx, const Matrix& m, const PackingPlan& plan,
                     Layout layout, const ckks::SecretKey& sk, Prng& rng, std::size_t level) {
  check_shape(m, plan);
  const std::size_t l = resolve_level(ctx, level);
  PackedMatrix pm{layout, plan, {}};
  for (std::size_t idx = 0; idx < pm.expected_tiles(); ++idx) {
    const auto v = tile_values(m, plan, layout, idx);
    pm.cts.push_back(ckks::encrypt_sk(ctx, ckks::encode(ctx, v, ctx.scale_at(l), l), sk, rng));
  }
  return pm;
}

std::vector<std::vector<double>> decrypt_tiles(const ckks::Context& ctx, const PackedMatrix& pm,
                                               const ckks::SecretKey& sk) {
  std::vector<std::vector<double>> out;
  out.reserve(pm.cts.size());
  for (const auto& ct : pm.cts) out.push_back(ckks::decode(ctx, ckks::decrypt(ctx, ct, sk)));
  return out;
}

Matrix unpack(const ckks::Context& ctx, const PackedMatrix& pm, const ckks::SecretKey& sk) {
  if (pm.cts.size() != pm.expected_tiles()) {
    throw InvalidArgument("unpack: packed matrix has " + std::to_string(pm.cts.size()) +
                          " tiles, layout needs " + std::to_string(pm.expected_tiles()));
  }
  const auto tiles = decrypt_tiles(ctx, pm, sk);
  const auto& p = pm.plan;
  const std::size_t R = p.padded_rows, C = p.padded_cols;
  Matrix m(p.rows, p.cols);
  for (std::size_t idx = 0; idx < tiles.size(); ++idx) {
    const std::size_t a = idx / p.col_tiles, t = idx % p.col_tiles;
    const auto& v = tiles[idx];
    if (pm.layout == Layout::kRowMajor) {
      for (std::size_t r = a * R; r < std::min(p.rows, (a + 1) * R); ++r)
        for (std::size_t j = t * C; j < std::min(p.cols, (t + 1) * C); ++j)
          m(r, j) = v[(r - a * R) * C + (j - t * C)];
    } else {
      for (std::size_t j = t * C; j < std::min(p.rows, (t + 1) * C); ++j) m(j, a) = v[j - t * C];
    }
  }
  return m;
}

void write(ByteWriter& w, const ckks::Context& ctx, const PackedMatrix& pm) {
  if (pm.cts.size() != pm.expected_tiles()) throw InvalidArgument("PMX1: tile count mismatch");
  const auto& p = pm.plan;
  w.magic("PMX1");
  w.u8(kPmxVersion);
  w.u8(static_cast<std::uint8_t>(pm.layout));
  for (std::size_t v : {p.rows, p.cols, p.padded_rows, p.padded_cols, p.row_tiles, p.col_tiles})
    w.u32(static_cast<std::uint32_t>(v));
  w.u32(static_cast<std::uint32_t>(pm.cts.size()));
  for (const auto& ct : pm.cts) w.blob(ckks::serialize(ctx, ct));
}

PackedMatrix read_packed(ByteReader& r, const ckks::Context& ctx) {
  r.expect_magic("PMX1");
  if (r.u8() != kPmxVersion) throw FormatError("PMX1: unsupported version");
  const auto layout_byte = r.u8();
  if (layout_byte != 1 && layout_byte != 2) throw FormatError("PMX1: unknown layout");
  const std::size_t rows = r.u32(), cols = r.u32(), R = r.u32(), C = r.u32();
  const std::size_t row_tiles = r.u32(), col_tiles = r.u32(), count = r.u32();

  PackedMatrix pm;
  pm.layout = static_cast<Layout>(layout_byte);
  try {
    if (pm.layout == Layout::kRowMajor) {
      pm.plan = plan_packing_with_width(rows, cols, ctx.slot_count(), C);
    } else {
      const auto partner = plan_packing_with_width(std::max<std::size_t>(R, 1), rows,
                                                   ctx.slot_count(), C);
      pm.plan = column_replicated_plan(rows, cols, partner);
    }
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("PMX1: ") + e.what());
  }
  const auto& p = pm.plan;
  if (p.padded_rows != R || p.padded_cols != C || p.row_tiles != row_tiles ||
      p.col_tiles != col_tiles || count != pm.expected_tiles()) {
    throw FormatError("PMX1: header geometry is inconsistent");
  }
  pm.cts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    pm.cts.push_back(ckks::deserialize_ciphertext(r.blob(), ctx));
    if (pm.cts[i].level() != pm.cts[0].level() || pm.cts[i].scale != pm.cts[0].scale) {
      throw FormatError("PMX1: tiles disagree on level or scale");
    }
  }
  return pm;
}

Bytes serialize(const ckks::Context& ctx, const PackedMatrix& pm) {
  ByteWriter w;
  write(w, ctx, pm);
  return w.take();
}

PackedMatrix deserialize_packed(std::span<const std::uint8_t> bytes, const ckks::Context& ctx) {
  ByteReader r(bytes, "PMX1");
  auto pm = read_packed(r, ctx);
  r.expect_end();
  return pm;
}

}  // namespace hefine::linalg
