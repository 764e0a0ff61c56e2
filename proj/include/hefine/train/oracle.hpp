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
#include "hefine/common/matrix.hpp"
#include "hefine/train/hyperparams.hpp"

namespace hefine::train {

// ---- NAG momentum ----

struct Momentum {
  double next_lambda;  // lambda_{t+1} = (1 + sqrt(1 + 4 lambda_t^2)) / 2
  double gamma;        // gamma_t = (1 - lambda_t) / lambda_{t+1}
};

/// Throws InvalidArgument for lambda < 0.
Momentum nag_momentum_schedule(double lambda);

/// Mixing weight of the step taken from state lambda_t. The weight comes
/// from the advanced lambda, so the first step (lambda_0 = 0) uses 0 and
/// later steps a negative weight that grows towards -1.
double nag_step_gamma(double lambda);

// ---- plaintext oracle ----

/// One mini-batch: features (bias column included) and one-hot labels.
struct PlainBatch {
  Matrix x, y;
};

/// Consecutive row chunks of at most batch_size rows, in order.
std::vector<PlainBatch> make_batches(const Matrix& x, const Matrix& y, std::size_t batch_size);

Matrix one_hot(std::span<const std::uint16_t> labels, std::size_t classes);

/// (1/n) X^T (softmax(X W) - Y). `approx` selects the plaintext mirror of
/// the encrypted softmax; null uses the exact one.
Matrix gradient(const Matrix& x, const Matrix& y, const Matrix& w,
                const approx::SoftmaxPlan* approx = nullptr);

/// Mean cross-entropy with the exact softmax.
double cross_entropy(const Matrix& x, const Matrix& y, const Matrix& w);

/// Row argmax, ties to the lowest index.
std::vector<std::size_t> argmax_rows(const Matrix& logits);
/// Fraction of rows whose argmax equals the label.
double accuracy(const Matrix& logits, std::span<const std::uint16_t> labels);

struct PlainState {
  Matrix w, v, w_prev;
  double lambda = 0.0;
  std::uint64_t step = 0;
};

PlainState plain_init(std::size_t d, std::size_t c);

/// W' = V - lr * grad(V);  V' = (1 - gamma) W' + gamma W.
void plain_nag_step(PlainState& s, const PlainBatch& batch, double learning_rate,
                    const approx::SoftmaxPlan* approx = nullptr);

struct PlainRun {
  PlainState state;
  /// Training loss after every epoch.
  std::vector<double> epoch_loss;
  /// Largest |z_j - mean(z)| met while training, to spot logits leaving
  /// the softmax approximation domain.
  double max_centred_logit = 0.0;
};

/// hp.epochs passes over the batches. `on_step` runs after every step.
PlainRun plaintext_train(std::span<const PlainBatch> batches, const Hyperparams& hp,
                         const approx::SoftmaxPlan* approx = nullptr,
                         const std::function<void(const PlainState&)>& on_step = {});

}  // namespace hefine::train
