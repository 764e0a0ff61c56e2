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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"

namespace hefine::ckks {

/// Canonical-embedding encoder restricted to real slot values.
///
/// Slot j is the evaluation of the message polynomial at zeta^(5^j), with
/// zeta = exp(i pi / N); the conjugate half of the spectrum is implied, so
/// the message polynomial has real (then rounded integer) coefficients.
/// Fewer than slot_count values are zero padded.
Plaintext encode(const Context& ctx, std::span<const double> values, double scale,
                 std::size_t level);
/// Every slot holds `value`: the constant polynomial round(value * scale).
Plaintext encode_constant(const Context& ctx, double value, double scale, std::size_t level);
/// Slot values of `pt` divided by its scale; returns slot_count reals.
std::vector<double> decode(const Context& ctx, const Plaintext& pt);

/// The special FFT pair the encoder is built on, exposed for tests.
/// `special_ifft` maps slot values to the complex coefficient vector,
/// `special_fft` maps back. Both work in place on slot_count values.
void special_fft(const Context& ctx, std::span<std::complex<double>> vals);
void special_ifft(const Context& ctx, std::span<std::complex<double>> vals);

}  // namespace hefine::ckks
