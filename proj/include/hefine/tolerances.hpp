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

// Error budgets of the encrypted operations at the test profile
// (N = 2^13, scale 2^40), for slot values in [-1, 1]. Unit tests, the
// acceptance binary and the README all read these constants.

namespace hefine::tol {

// ---- ckks ----
inline constexpr double kEncodeRoundtrip = 0x1p-25;
inline constexpr double kEncryptRoundtrip = 0x1p-20;
inline constexpr double kAdd = 0x1p-19;
/// Relative to max |v1 * v2|, after one rescale.
inline constexpr double kMultRelative = 0x1p-15;
inline constexpr double kAssociativity = 0x1p-12;
inline constexpr double kRotate = 0x1p-19;
inline constexpr double kRescale = 0x1p-19;
/// Budget charged per operation in composite circuits.
inline constexpr double kPerOp = 0x1p-17;

// ---- enc_linalg ----
inline constexpr double kPackRoundtrip = 0x1p-19;
inline constexpr double kMatmul = 1e-3;
inline constexpr double kDotRelative = 1e-4;
inline constexpr double kRowSum = 1e-4;
inline constexpr double kScalarOps = 1e-5;

// ---- approx_ops ----
inline constexpr double kExpFit = 1e-3;
inline constexpr double kExpEncrypted = 2e-3;
/// Encrypted polynomial evaluation against the same polynomial in plaintext.
inline constexpr double kPolyFheNoise = 1e-5;
inline constexpr double kGoldschmidtRelative = 1e-4;
inline constexpr double kSoftmax = 1e-2;
inline constexpr double kSoftmaxUniform = 1e-3;

// ---- trainer ----
inline constexpr double kGradient = 1e-3;
inline constexpr double kLockstepWeights = 5e-3;
inline constexpr double kFiniteDifference = 1e-5;
inline constexpr double kInferLogits = 1e-3;
/// Refresh preserves values to this absolute error.
inline constexpr double kRefresh = 0x1p-15;

}  // namespace hefine::tol
