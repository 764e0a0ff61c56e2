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

#include "hefine/train/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hefine/common/error.hpp"

namespace hefine::train {
namespace {

double max_centred(const Matrix& z) {
  double m = 0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    double mean = 0;
    for (double v : z.row(i)) mean += v;
    mean /= static_cast<double>(z.cols);
    for (double v : z.row(i)) m = std::max(m, std::abs(v - mean));
  }
  return m;
}

Matrix probabilities(const Matrix& z, const approx::SoftmaxPlan* approx) {
  return approx ? approx::approx_softmax_plain(z, *approx) : approx::exact_softmax(z);
}

}  // namespace

Momentum nag_momentum_schedule(double lambda) {
  if (!(lambda >= 0)) throw InvalidArgument("nag_momentum_schedule: lambda must be non-negative");
  const double next = (1.0 + std::sqrt(1.0 + 4.0 * lambda * lambda)) / 2.0;
  return {next, (1.0 - lambda) / next};
}

double nag_step_gamma(double lambda) {
  return nag_momentum_schedule(nag_momentum_schedule(lambda).next_lambda).gamma;
}

std::vector<PlainBatch> make_batches(const Matrix& x, const Matrix& y, std::size_t batch_size) {
  if (x.rows != y.rows) throw InvalidArgument("make_batches: feature and label row counts differ");
  if (batch_size == 0) throw InvalidArgument("make_batches: batch size must be at least 1");
  std::vector<PlainBatch> out;
  for (std::size_t b = 0; b < x.rows; b += batch_size) {
    const std::size_t e = std::min(x.rows, b + batch_size);
    out.push_back({slice_rows(x, b, e), slice_rows(y, b, e)});
  }
  return out;
}

Matrix one_hot(std::span<const std::uint16_t> labels, std::size_t classes) {
  Matrix y(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) {
      throw InvalidArgument("one_hot: label " + std::to_string(labels[i]) + " out of range");
    }
    y(i, labels[i]) = 1.0;
  }
  return y;
}

Matrix gradient(const Matrix& x, const Matrix& y, const Matrix& w, const approx::SoftmaxPlan* approx) {
  auto e = probabilities(multiply(x, w), approx);
  for (std::size_t i = 0; i < e.data.size(); ++i) e.data[i] -= y.data[i];
  auto g = multiply_at_b(x, e);
  for (auto& v : g.data) v /= static_cast<double>(x.rows);
  return g;
}

double cross_entropy(const Matrix& x, const Matrix& y, const Matrix& w) {
  const auto z = multiply(x, w);
  double loss = 0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    const auto row = z.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0;
    for (double v : row) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t j = 0; j < z.cols; ++j) loss -= y(i, j) * (row[j] - lse);
  }
  return loss / static_cast<double>(z.rows);
}

std::vector<std::size_t> argmax_rows(const Matrix& logits) {
  std::vector<std::size_t> out(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double accuracy(const Matrix& logits, std::span<const std::uint16_t> labels) {
  if (logits.rows != labels.size()) throw InvalidArgument("accuracy: row and label counts differ");
  if (labels.empty()) return 0.0;
  const auto pred = argmax_rows(logits);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

PlainState plain_init(std::size_t d, std::size_t c) {
  PlainState s;
  s.w = s.v = s.w_prev = Matrix(d, c);
  return s;
}

void plain_nag_step(PlainState& s, const PlainBatch& batch, double learning_rate,
                    const approx::SoftmaxPlan* approx) {
  const double gamma = nag_step_gamma(s.lambda);
  const auto g = gradient(batch.x, batch.y, s.v, approx);
  Matrix w_new = s.v;
  for (std::size_t i = 0; i < w_new.data.size(); ++i) w_new.data[i] -= learning_rate * g.data[i];
  Matrix v_new = w_new;
  for (std::size_t i = 0; i < v_new.data.size(); ++i) {
    v_new.data[i] = (1.0 - gamma) * w_new.data[i] + gamma * s.w.data[i];
  }
  s.w_prev = std::move(s.w);
  s.w = std::move(w_new);
  s.v = std::move(v_new);
  s.lambda = nag_momentum_schedule(s.lambda).next_lambda;
  ++s.step;
}

PlainRun plaintext_train(std::span<const PlainBatch> batches, const Hyperparams& hp,
                         const approx::SoftmaxPlan* approx,
                         const std::function<void(const PlainState&)>& on_step) {
  validate(hp);
  PlainRun run;
  run.state = plain_init(hp.feature_dim, hp.class_count);
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    for (const auto& b : batches) {
      run.max_centred_logit = std::max(run.max_centred_logit, max_centred(multiply(b.x, run.state.v)));
      plain_nag_step(run.state, b, hp.learning_rate, approx);
      if (on_step) on_step(run.state);
    }
    double loss = 0;
    std::size_t rows = 0;
    for (const auto& b : batches) {
      loss += cross_entropy(b.x, b.y, run.state.w) * static_cast<double>(b.x.rows);
      rows += b.x.rows;
    }
    run.epoch_loss.push_back(rows ? loss / static_cast<double>(rows) : 0.0);
  }
  return run;
}

}  // namespace hefine::train
