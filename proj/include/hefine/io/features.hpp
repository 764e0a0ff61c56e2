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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hefine/common/bytes.hpp"
#include "hefine/common/matrix.hpp"

namespace hefine::io {

/// Labelled feature rows as they come out of the extractor.
struct FeatureSet {
  Matrix x;
  std::vector<std::uint16_t> labels;
  std::size_t classes = 0;

  std::size_t rows() const noexcept { return x.rows; }
  std::size_t dim() const noexcept { return x.cols; }
};

// EFV1 layout (little-endian):
//   "EFV1" | version u8 | rows u32 | dim u32 | classes u16 | label width u8
//   (2) | dtype u8 (0 = f32) | rows*dim f32 row-major | rows u16 labels
// The file is exactly header + rows*dim*4 + rows*2 bytes.
inline constexpr std::uint8_t kEfvVersion = 1;
inline constexpr std::size_t kEfvHeaderSize = 17;

/// Throws InvalidArgument for inconsistent sets (label count, label range,
/// class count over 65535, non-finite features).
void validate(const FeatureSet& fs);

/// Features are narrowed to f32.
Bytes encode_efv(const FeatureSet& fs);
/// Throws FormatError naming the offending field.
FeatureSet decode_efv(std::span<const std::uint8_t> bytes);

/// File helpers; IoError when the file cannot be read or written.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
FeatureSet load_efv(const std::filesystem::path& path);
void save_efv(const std::filesystem::path& path, const FeatureSet& fs);

/// CSV import: one row per line, features then the integer label last;
/// blank lines and lines starting with '#' are skipped. The class count
/// is max label + 1. Throws FormatError with the line number.
FeatureSet parse_csv(const std::string& text);

/// Gaussian mixture with unit-variance classes whose centroids sit 6
/// standard deviations apart (orthogonal axes when classes <= dim, random
/// directions otherwise). Labels cycle through the classes before the rows
/// are shuffled, so class sizes differ by at most one.
FeatureSet gen_blobs(std::size_t classes, std::size_t dim, std::size_t rows, std::uint64_t seed,
                     double separation = 6.0);

}  // namespace hefine::io
