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

#include "hefine/train/hyperparams.hpp"

#include <array>
#include <cmath>
#include <string>

#include "hefine/common/error.hpp"

namespace hefine::train {
namespace {

constexpr std::array<Preset, 5> kPresets{{
    {"dermamnist", 12, 0.01, 512},
    {"bloodmnist", 18, 0.1, 512},
    {"organamnist", 6, 0.01, 512},
    {"organcmnist", 17, 0.01, 512},
    {"organsmnist", 15, 0.01, 512},
}};

}  // namespace

void validate(const Hyperparams& hp) {
  if (hp.batch_size == 0) throw InvalidArgument("hyperparams: batch size must be at least 1");
  if (!(hp.learning_rate > 0) || !std::isfinite(hp.learning_rate)) {
    throw InvalidArgument("hyperparams: learning rate must be positive");
  }
  if (hp.feature_dim == 0) throw InvalidArgument("hyperparams: feature dimension is not set");
  if (hp.class_count < 2) throw InvalidArgument("hyperparams: need at least two classes");
}

std::span<const Preset> presets() { return kPresets; }

const Preset& find_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return p;
  }
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

void apply(const Preset& preset, Hyperparams& hp) {
  hp.epochs = preset.epochs;
  hp.learning_rate = preset.learning_rate;
  hp.batch_size = preset.batch_size;
}

void write(ByteWriter& w, const Hyperparams& hp) {
  w.u32(static_cast<std::uint32_t>(hp.epochs));
  w.f64(hp.learning_rate);
  w.u32(static_cast<std::uint32_t>(hp.batch_size));
  w.u32(static_cast<std::uint32_t>(hp.feature_dim));
  w.u32(static_cast<std::uint32_t>(hp.class_count));
  approx::write(w, hp.softmax);
  w.u64(hp.seed);
}

Hyperparams read_hyperparams(ByteReader& r) {
  Hyperparams hp;
  hp.epochs = r.u32();
  hp.learning_rate = r.f64();
  hp.batch_size = r.u32();
  hp.feature_dim = r.u32();
  hp.class_count = r.u32();
  hp.softmax = approx::read_softmax_config(r);
  hp.seed = r.u64();
  try {
    validate(hp);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return hp;
}

}  // namespace hefine::train
