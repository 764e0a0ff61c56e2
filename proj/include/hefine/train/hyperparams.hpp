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
#include <string_view>

#include "hefine/approx/softmax.hpp"
#include "hefine/common/bytes.hpp"

namespace hefine::train {

struct Hyperparams {
  std::size_t epochs = 10;
  double learning_rate = 0.1;
  std::size_t batch_size = 512;
  /// Feature count including the appended constant-1 bias column.
  std::size_t feature_dim = 0;
  std::size_t class_count = 0;
  approx::SoftmaxConfig softmax;
  std::uint64_t seed = 0;

  bool operator==(const Hyperparams&) const = default;
};

/// Throws InvalidArgument unless batch_size >= 1, learning_rate > 0 and
/// both dimensions are set (class_count >= 2).
void validate(const Hyperparams& hp);

/// Per-dataset training settings (epochs, rate, batch).
struct Preset {
  std::string_view name;
  std::size_t epochs;
  double learning_rate;
  std::size_t batch_size;
};

std::span<const Preset> presets();
/// Case-sensitive lookup ("dermamnist", "bloodmnist", ...); throws
/// InvalidArgument for unknown names.
const Preset& find_preset(std::string_view name);
/// Copies the preset's epochs, rate and batch size into hp.
void apply(const Preset& preset, Hyperparams& hp);

void write(ByteWriter& w, const Hyperparams& hp);
/// Throws FormatError for truncated input or fields that fail validate().
Hyperparams read_hyperparams(ByteReader& r);

}  // namespace hefine::train
