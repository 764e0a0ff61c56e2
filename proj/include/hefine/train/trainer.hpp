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
#include <functional>
#include <span>
#include <vector>

#include "hefine/approx/softmax.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/refresh.hpp"
#include "hefine/common/bytes.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/linalg/packing.hpp"
#include "hefine/train/hyperparams.hpp"

namespace hefine::train {

/// An encrypted mini-batch. X is row-major n x d; Y is the one-hot n x c
/// label matrix packed with X's segment width (see label_plan), so the
/// softmax output and Y share one geometry.
struct EncBatch {
  linalg::PackedMatrix x, y;
};

/// Plan of the labels that go with features packed under `x_plan`.
linalg::PackingPlan label_plan(std::size_t classes, const linalg::PackingPlan& x_plan);
/// Plan of the d x c weights (column-replicated against `x_plan`).
linalg::PackingPlan weight_plan(std::size_t classes, const linalg::PackingPlan& x_plan);

/// Hospital side: encrypts plaintext batches at the top level.
EncBatch encrypt_batch(const ckks::Context& ctx, const Matrix& x, const Matrix& y,
                       const ckks::PublicKey& pk, Prng& rng);

/// Encrypted weights W, the NAG sequence V (where gradients are taken)
/// and the previous W, with the public momentum scalar and step count.
struct ModelState {
  linalg::PackedMatrix w, v, w_prev;
  double lambda = 0.0;
  std::uint64_t step = 0;
};

/// W = V = W_prev = Enc(0) of shape d x c under weight_plan; lambda 0.
ModelState init_model(const ckks::Context& ctx, const Hyperparams& hp,
                      const linalg::PackingPlan& x_plan, const ckks::PublicKey& pk,
                      std::uint64_t seed);

/// scale / n * X^T (softmax~(X V) - Y), column-replicated like V. The
/// softmax is the encrypted approximation of `plan`. Stages that would run
/// out of levels refresh their operands through `refresher`; the result
/// keeps more than `spare` levels. Without a refresher a short budget
/// throws LevelExhausted.
linalg::PackedMatrix encrypted_grad(const ckks::Context& ctx, const EncBatch& batch,
                                    const linalg::PackedMatrix& v, const approx::SoftmaxPlan& plan,
                                    const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
                                    ckks::Refresher* refresher, double scale = 1.0,
                                    std::size_t spare = 0);

/// One NAG step:
///   W' = V - lr * G(V),  V' = (1 - gamma) W' + gamma W,  W_prev' = W,
/// with gamma = nag_step_gamma(lambda). W' and V' are refreshed at the end
/// when a refresher is given.
ModelState nag_step(const ckks::Context& ctx, const ModelState& state, const EncBatch& batch,
                    double learning_rate, const approx::SoftmaxPlan& plan,
                    const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
                    ckks::Refresher* refresher);

struct EpochLog {
  std::uint32_t epoch = 0;
  std::uint32_t steps = 0;
  std::uint32_t refresh_rounds = 0;
  double seconds = 0.0;

  bool operator==(const EpochLog&) const = default;
};

struct TrainingRun {
  Hyperparams hp;
  std::vector<EpochLog> log;
  ModelState state;
};

struct TrainHooks {
  /// After every completed step; `run.state` is current.
  std::function<void(const TrainingRun& run)> on_step;
  /// After every completed epoch, with its log entry appended.
  std::function<void(const TrainingRun& run)> on_epoch;
};

/// Runs the remaining steps of hp.epochs passes over `batches`, starting
/// from run.state.step (so a resumed run continues mid-epoch). run.state
/// and run.log only ever hold completed steps: if the refresher throws,
/// the exception propagates and `run` can be checkpointed and resumed.
void train(const ckks::Context& ctx, std::span<const EncBatch> batches, TrainingRun& run,
           const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
           ckks::Refresher& refresher, const TrainHooks& hooks = {});

/// Encrypted logits X W (no softmax); the key holder takes the argmax.
linalg::PackedMatrix encrypted_infer(const ckks::Context& ctx, const linalg::PackedMatrix& w,
                                     const linalg::PackedMatrix& x, const ckks::EvaluationKey& evk,
                                     const ckks::RotationKeySet& rot);

// Checkpoint layout (little-endian):
//   "HTC1" | version u8 | hyperparams | epochs logged u32 | per epoch:
//   epoch u32, steps u32, refresh rounds u32, seconds f64 | W, V, W_prev as
//   u64-length-prefixed PMX1 | lambda f64 | step u64
inline constexpr std::uint8_t kCheckpointVersion = 1;

void write_checkpoint(ByteWriter& w, const ckks::Context& ctx, const TrainingRun& run);
TrainingRun read_checkpoint(ByteReader& r, const ckks::Context& ctx);

}  // namespace hefine::train
