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
#include "hefine/common/matrix.hpp"
#include "hefine/linalg/packing.hpp"

namespace hefine::linalg {

// Level budgets. Binary operations start from the lower operand level; the
// result sits exactly this many levels below it, at the canonical scale.
inline constexpr std::size_t kMatmulDepth = 2;
inline constexpr std::size_t kMatmulAtBDepth = 2;
inline constexpr std::size_t kRowReduceDepth = 1;
inline constexpr std::size_t kScalarMultDepth = 1;

/// Window sum to the left: slot i receives sum_{j < width} slot (i + j).
/// width must be a power of two; uses rotations 1, 2, ..., width/2.
ckks::Ciphertext rotate_sum(const ckks::Context& ctx, const ckks::Ciphertext& ct,
                            std::size_t width, const ckks::RotationKeySet& rot);
/// Window sum to the right: slot i receives sum_{j < width} slot (i - j).
/// Spreads a value sitting alone at the start of a zero window over it.
ckks::Ciphertext broadcast_right(const ckks::Context& ctx, const ckks::Ciphertext& ct,
                                 std::size_t width, const ckks::RotationKeySet& rot);
/// Slot value at position b*C + offset for every row segment b < R,
/// zero elsewhere.
std::vector<double> segment_mask(const PackingPlan& plan, std::size_t offset, double value);

/// A[n x d] (row-major) times B[d x c] (column-replicated against A's plan):
/// the row-major n x c product sharing A's row geometry. Per class k the
/// tiles of A are multiplied by column k, summed across each row segment,
/// masked to the segment's first slot and shifted right by k.
/// Throws InvalidArgument on layout or shape mismatch (c must fit in C).
PackedMatrix matmul(const ckks::Context& ctx, const PackedMatrix& a, const PackedMatrix& b,
                    const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot);
/// Same with a plaintext right operand.
PackedMatrix matmul(const ckks::Context& ctx, const PackedMatrix& a, const Matrix& b,
                    const ckks::RotationKeySet& rot);

/// factor * A^T B for row-major A[n x d] and B[n x c] packed with the same
/// segment width and row geometry; the d x c result comes out
/// column-replicated against A's plan, ready to be the right operand of
/// matmul. Row k of B's segments is masked out (folding in `factor`),
/// shifted to the segment start, broadcast over the segment, multiplied
/// into A and summed over all segments and row tiles.
PackedMatrix matmul_At_B(const ckks::Context& ctx, const PackedMatrix& a, const PackedMatrix& b,
                         const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
                         double factor = 1.0);

/// Row-major only: every slot of row i's segment (padding columns
/// included) holds factor * sum_j row_i[j]. Padding columns must be zero.
PackedMatrix row_reduce_sum(const ckks::Context& ctx, const PackedMatrix& pm,
                            const ckks::RotationKeySet& rot, double factor = 1.0);

/// k * pm, one level down.
PackedMatrix scalar_mult(const ckks::Context& ctx, const PackedMatrix& pm, double k);
/// k * pm landing at `level` (< pm.level()).
PackedMatrix scalar_mult(const ckks::Context& ctx, const PackedMatrix& pm, double k,
                         std::size_t level);
/// pm at `level` and the canonical scale; identity when already there.
PackedMatrix bring_to(const ckks::Context& ctx, const PackedMatrix& pm, std::size_t level);

/// Tile-wise sum and difference; layouts, geometry, levels and scales must
/// agree (InvalidArgument, DomainMismatch or ScaleMismatch otherwise).
PackedMatrix matrix_add(const PackedMatrix& a, const PackedMatrix& b);
PackedMatrix matrix_sub(const PackedMatrix& a, const PackedMatrix& b);

}  // namespace hefine::linalg
