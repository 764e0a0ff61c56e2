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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "hefine/ring/kernels.hpp"

namespace hefine::ring {
namespace {

std::atomic<const Kernels*> g_override{nullptr};

const Kernels& detect() {
  if (const char* env = std::getenv("HEFINE_KERNELS"); env && std::string_view(env) == "scalar") {
    return scalar_kernels();
  }
  if (const Kernels* k = avx2_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const Kernels& kernels() {
  if (const Kernels* k = g_override.load(std::memory_order_acquire)) return *k;
  static const Kernels& selected = detect();
  return selected;
}

void override_kernels(const Kernels* k) { g_override.store(k, std::memory_order_release); }

}  // namespace hefine::ring
