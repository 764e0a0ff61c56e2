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
#include <span>
#include <vector>

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/common/bytes.hpp"
#include "hefine/common/matrix.hpp"
#include "hefine/common/prng.hpp"

namespace hefine::linalg {

/// Slot geometry of a logical rows x cols matrix.
///
/// A ciphertext holds R row segments of C slots each: row r of a tile
/// occupies slots [r*C, r*C + C). C is the next power of two of cols, capped
/// at slot_count; wider rows are split into col_tiles segments of C
/// columns. R is the next power of two of rows, capped at slot_count / C;
/// taller matrices use row_tiles ciphertexts stacked vertically.
struct PackingPlan {
  std::size_t slot_count = 0;
  std::size_t rows = 0, cols = 0;
  std::size_t padded_rows = 0;  // R
  std::size_t padded_cols = 0;  // C
  std::size_t row_tiles = 0, col_tiles = 0;
  /// Every rotation step the matrix operations may request on this layout,
  /// normalised and sorted.
  std::vector<long> rotation_steps;

  std::size_t tile_count() const noexcept { return row_tiles * col_tiles; }
  /// Row segments per ciphertext (slot_count / C); at least R.
  std::size_t blocks() const noexcept { return slot_count / padded_cols; }

  bool operator==(const PackingPlan&) const = default;
};

/// Deterministic; throws InvalidArgument when rows or cols is zero or
/// slot_count is not a power of two.
PackingPlan plan_packing(std::size_t rows, std::size_t cols, std::size_t slot_count);

/// Same as plan_packing but with row segments at least `min_width` slots
/// wide, so that a matrix with few columns can share a partner's geometry
/// (labels alongside features, logits alongside weights).
PackingPlan plan_packing_with_width(std::size_t rows, std::size_t cols, std::size_t slot_count,
                                    std::size_t min_width);

enum class Layout : std::uint8_t {
  /// Tile (i, t) holds rows [i*R, (i+1)*R) and columns [t*C, (t+1)*C) at
  /// slot (r - i*R)*C + (j - t*C); stored at cts[i * col_tiles + t].
  kRowMajor = 1,
  /// For a d x c matrix packed against a row-major partner of width C:
  /// ciphertext cts[k * col_tiles + t] carries column k, entries
  /// [t*C, (t+1)*C), laid out along one row segment and repeated in every
  /// one of the slot_count / C segments. The plan is the partner's
  /// geometry with rows = d, cols = c, R = slot_count / C and one row
  /// tile, so it depends on the partner only through C.
  kColumnReplicated = 2,
};

/// An encrypted matrix: tiles share level, scale and geometry. Padding
/// slots are zero when packed.
struct PackedMatrix {
  Layout layout = Layout::kRowMajor;
  PackingPlan plan;
  std::vector<ckks::Ciphertext> cts;

  std::size_t rows() const noexcept { return plan.rows; }
  std::size_t cols() const noexcept { return plan.cols; }
  std::size_t level() const noexcept { return cts.empty() ? 0 : cts.front().level(); }
  double scale() const noexcept { return cts.empty() ? 0.0 : cts.front().scale; }
  /// Number of ciphertexts the layout needs.
  std::size_t expected_tiles() const noexcept;
};

/// Plan of the column-replicated d x c companion of a row-major matrix
/// whose columns (the d axis) are laid out by `partner`.
PackingPlan column_replicated_plan(std::size_t d, std::size_t c, const PackingPlan& partner);

/// Slot vector of row-major tile (i, t); padding is zero.
std::vector<double> row_major_tile(const Matrix& m, const PackingPlan& plan, std::size_t i,
                                   std::size_t t);
/// Slot vector of column-replicated ciphertext (k, t).
std::vector<double> column_replicated_tile(const Matrix& m, const PackingPlan& plan,
                                           std::size_t k, std::size_t t);

/// Encrypts `m` under the public key at `level` (0 = top) with the
/// canonical scale of that level. Throws InvalidArgument when m's shape
/// differs from the plan's.
PackedMatrix pack(const ckks::Context& ctx, const Matrix& m, const PackingPlan& plan,
                  const ckks::PublicKey& pk, Prng& rng, std::size_t level = 0);
PackedMatrix pack_column_replicated(const ckks::Context& ctx, const Matrix& m,
                                    const PackingPlan& plan, const ckks::PublicKey& pk, Prng& rng,
                                    std::size_t level = 0);
/// Secret-key variant used when the key holder re-encrypts.
PackedMatrix pack_sk(const ckks::Context& ctx, const Matrix& m, const PackingPlan& plan,
                     Layout layout, const ckks::SecretKey& sk, Prng& rng, std::size_t level = 0);

/// Decrypts and reassembles the logical matrix (padding dropped). For the
/// column-replicated layout the first row segment is read.
Matrix unpack(const ckks::Context& ctx, const PackedMatrix& pm, const ckks::SecretKey& sk);
/// Decoded slot vectors of every tile, padding included.
std::vector<std::vector<double>> decrypt_tiles(const ckks::Context& ctx, const PackedMatrix& pm,
                                               const ckks::SecretKey& sk);

// PMX1 layout (little-endian):
//   "PMX1" | version u8 | layout u8 | rows u32 | cols u32 | R u32 | C u32
//   | row_tiles u32 | col_tiles u32 | count u32 | per ciphertext: u64 length
//   + CKX1 object
// slot_count comes from the context and rotation steps are recomputed.
inline constexpr std::uint8_t kPmxVersion = 1;

void write(ByteWriter& w, const ckks::Context& ctx, const PackedMatrix& pm);
PackedMatrix read_packed(ByteReader& r, const ckks::Context& ctx);
Bytes serialize(const ckks::Context& ctx, const PackedMatrix& pm);
PackedMatrix deserialize_packed(std::span<const std::uint8_t> bytes, const ckks::Context& ctx);

}  // namespace hefine::linalg
