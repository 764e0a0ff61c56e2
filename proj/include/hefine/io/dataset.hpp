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
#include <string>
#include <vector>

#include "hefine/common/matrix.hpp"
#include "hefine/io/features.hpp"

namespace hefine::io {

/// Train / validation / test fractions; they must sum to 1.
struct SplitSpec {
  double train = 0.7, val = 0.1, test = 0.2;
};

struct Split {
  std::vector<std::size_t> train, val, test;
};

/// Per class, the shuffled row indices are cut at round(train * n_c) and
/// round((train + val) * n_c); each part is then shuffled. Deterministic in
/// the seed. Throws InvalidArgument for fractions that are negative or do
/// not sum to 1.
Split stratified_split(std::span<const std::uint16_t> labels, std::size_t classes,
                       const SplitSpec& spec, std::uint64_t seed);

/// Rows `idx` of fs, in that order.
FeatureSet subset(const FeatureSet& fs, std::span<const std::size_t> idx);

/// Feature standardisation fitted on the training rows, followed by a
/// rescale of every row to L2 norm at most clip_norm and a constant 1 bias
/// column. The statistics stay with the key holder.
struct Standardizer {
  std::vector<double> mean, stddev;
  double clip_norm = 4.0;

  /// Columns without spread (up to rounding) keep stddev 1.
  static Standardizer fit(const Matrix& x, double clip_norm = 4.0);
  /// rows x (dim + 1) output; throws InvalidArgument on a width mismatch.
  Matrix apply(const Matrix& x) const;

  /// JSON sidecar: {"format": "hefine-stats", "version": 1, "mean": [...],
  /// "stddev": [...], "clip_norm": 4, "bias": true}.
  std::string to_json() const;
  /// Throws FormatError for malformed sidecars.
  static Standardizer from_json(const std::string& text);
};

}  // namespace hefine::io
