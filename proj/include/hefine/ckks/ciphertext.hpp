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
#include <vector>

#include "hefine/ring/ring_poly.hpp"

namespace hefine::ckks {

/// An encoded message: one ring element (NTT form) and the scale its slot
/// values were multiplied by.
struct Plaintext {
  ring::RingPoly poly;
  double scale = 0.0;

  std::size_t level() const noexcept { return poly.level(); }
};

/// (c0, c1) with c0 + c1*s = m + e, or (c0, c1, c2) straight out of a tensor
/// product before relinearization. Polynomials are kept in NTT form.
struct Ciphertext {
  std::vector<ring::RingPoly> polys;
  double scale = 0.0;

  std::size_t level() const noexcept { return polys.empty() ? 0 : polys.front().level(); }
  std::size_t size() const noexcept { return polys.size(); }
};

}  // namespace hefine::ckks
