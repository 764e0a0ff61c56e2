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
#include <string_view>

#include "hefine/ring/modulus.hpp"
#include "hefine/ring/ntt.hpp"

namespace hefine::ring {

/// Residue-vector kernels: the hot loops of every ring operation.
///
/// A scalar reference implementation is always present. Vectorised variants
/// are compiled per target and picked at startup from the CPU's feature
/// flags; every variant must produce bit-identical output to the scalar one
/// (tests/unit/kernels_test.cpp checks this lane by lane). Inputs are fully
/// reduced residues in [0, q) unless noted; `out` may alias an input.
struct Kernels {
  std::string_view name;
  void (*add)(const u64* a, const u64* b, u64* out, std::size_t n, u64 q);
  void (*sub)(const u64* a, const u64* b, u64* out, std::size_t n, u64 q);
  void (*neg)(const u64* a, u64* out, std::size_t n, u64 q);
  /// out = a * b mod q, element-wise (Barrett).
  void (*mul)(const u64* a, const u64* b, u64* out, std::size_t n, const Modulus& q);
  /// acc = acc + a * b mod q, element-wise.
  void (*mul_add)(const u64* a, const u64* b, u64* acc, std::size_t n, const Modulus& q);
  /// out = a * w mod q for a fixed w with Shoup companion.
  void (*mul_scalar)(const u64* a, u64 w, u64 w_shoup, u64* out, std::size_t n, u64 q);
  void (*ntt_forward)(u64* a, const NttTables& tables);
  void (*ntt_inverse)(u64* a, const NttTables& tables);
};

const Kernels& scalar_kernels();
/// AVX2 variant, or nullptr when the build or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// The kernels used by the ring layer: the best supported variant unless
/// HEFINE_KERNELS=scalar is set in the environment or an override is active.
const Kernels& kernels();
/// Test/benchmark hook; pass nullptr to restore automatic selection.
void override_kernels(const Kernels* k);

}  // namespace hefine::ring
