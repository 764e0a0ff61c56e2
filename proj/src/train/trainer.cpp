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

#include "hefine/train/trainer.hpp"

#include <chrono>
#include <string>

#include "hefine/common/error.hpp"
#include "hefine/linalg/matrix_ops.hpp"
#include "hefine/train/oracle.hpp"

namespace hefine::train {
namespace {

using linalg::PackedMatrix;

std::vector<ckks::Ciphertext*> tiles_of(std::initializer_list<PackedMatrix*> ms) {
  std::vector<ckks::Ciphertext*> out;
  for (auto* m : ms)
    for (auto& ct : m->cts) out.push_back(&ct);
  return out;
}

/// Counts refresh rounds on the way to the real channel.
class CountingRefresher final : public ckks::Refresher {
 public:
  explicit CountingRefresher(ckks::Refresher& inner) : inner_(inner) {}
  void refresh(std::span<ckks::Ciphertext* const> cts) override {
    inner_.refresh(cts);
    ++rounds_;
  }
  std::size_t rounds() const noexcept { return rounds_; }

 private:
  ckks::Refresher& inner_;
  std::size_t rounds_ = 0;
};

}  // namespace

linalg::PackingPlan label_plan(std::size_t classes, const linalg::PackingPlan& x_plan) {
  return linalg::plan_packing_with_width(x_plan.rows, classes, x_plan.slot_count, x_plan.padded_cols);
}

linalg::PackingPlan weight_plan(std::size_t classes, const linalg::PackingPlan& x_plan) {
  return linalg::column_replicated_plan(x_plan.cols, classes, x_plan);
}

EncBatch encrypt_batch(const ckks::Context& ctx, const Matrix& x, const Matrix& y,
                       const ckks::PublicKey& pk, Prng& rng) {
  if (x.rows != y.rows) throw InvalidArgument("encrypt_batch: feature and label row counts differ");
  const auto xp = linalg::plan_packing(x.rows, x.cols, ctx.slot_count());
  return {linalg::pack(ctx, x, xp, pk, rng), linalg::pack(ctx, y, label_plan(y.cols, xp), pk, rng)};
}

ModelState init_model(const ckks::Context& ctx, const Hyperparams& hp,
                      const linalg::PackingPlan& x_plan, const ckks::PublicKey& pk,
                      std::uint64_t seed) {
  validate(hp);
  if (x_plan.cols != hp.feature_dim) {
    throw InvalidArgument("init_model: features have " + std::to_string(x_plan.cols) +
                          " columns, hyperparams say " + std::to_string(hp.feature_dim));
  }
  const auto plan = weight_plan(hp.class_count, x_plan);
  const Matrix zero(hp.feature_dim, hp.class_count);
  const Prng root(seed, "init_model");
  ModelState s;
  auto rw = root.fork("w"), rv = root.fork("v"), rp = root.fork("w_prev");
  s.w = linalg::pack_column_replicated(ctx, zero, plan, pk, rw);
  s.v = linalg::pack_column_replicated(ctx, zero, plan, pk, rv);
  s.w_prev = linalg::pack_column_replicated(ctx, zero, plan, pk, rp);
  return s;
}

PackedMatrix encrypted_grad(const ckks::Context& ctx, const EncBatch& batch, const PackedMatrix& v,
                            const approx::SoftmaxPlan& plan, const ckks::EvaluationKey& evk,
                            const ckks::RotationKeySet& rot, ckks::Refresher* refresher, double scale,
                            std::size_t spare) {
  if (batch.y.plan != label_plan(plan.classes, batch.x.plan)) {
    throw InvalidArgument("encrypted_grad: labels are not packed alongside the features");
  }
  auto vv = v;
  ckks::ensure_levels(tiles_of({&vv}), linalg::kMatmulDepth, refresher);
  const auto z = linalg::matmul(ctx, batch.x, vv, evk, rot);
  const auto p = approx::approx_softmax(ctx, z, plan, evk, rot, refresher);
  auto e = linalg::matrix_sub(p, linalg::bring_to(ctx, batch.y, p.level()));
  ckks::ensure_levels(tiles_of({&e}), linalg::kMatmulAtBDepth + spare, refresher);
  return linalg::matmul_At_B(ctx, batch.x, e, evk, rot, scale / static_cast<double>(batch.x.rows()));
}

ModelState nag_step(const ckks::Context& ctx, const ModelState& state, const EncBatch& batch,
                    double learning_rate, const approx::SoftmaxPlan& plan,
                    const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
                    ckks::Refresher* refresher) {
  auto w = state.w, v = state.v;
  ckks::ensure_levels(tiles_of({&w, &v}), linalg::kMatmulDepth, refresher);
  const double gamma = nag_step_gamma(state.lambda);
  const auto g = encrypted_grad(ctx, batch, v, plan, evk, rot, refresher, -learning_rate, 1);

  const std::size_t l = std::min({g.level(), v.level(), w.level()});
  ModelState out;
  out.w = linalg::matrix_add(linalg::bring_to(ctx, v, l), linalg::bring_to(ctx, g, l));
  out.v = linalg::matrix_add(linalg::scalar_mult(ctx, out.w, 1.0 - gamma, l - 1),
                             linalg::scalar_mult(ctx, w, gamma, l - 1));
  out.w_prev = state.w;
  out.lambda = nag_momentum_schedule(state.lambda).next_lambda;
  out.step = state.step + 1;
  if (refresher) refresher->refresh(tiles_of({&out.w, &out.v}));
  return out;
}

void train(const ckks::Context& ctx, std::span<const EncBatch> batches, TrainingRun& run,
           const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot,
           ckks::Refresher& refresher, const TrainHooks& hooks) {
  validate(run.hp);
  if (batches.empty()) throw InvalidArgument("train: no batches");
  const auto plan = approx::plan_softmax(run.hp.softmax, run.hp.class_count);
  const std::size_t per_epoch = batches.size();
  const std::uint64_t total = run.hp.epochs * per_epoch;
  if (run.log.size() != run.state.step / per_epoch) {
    throw InvalidArgument("train: log has " + std::to_string(run.log.size()) +
                          " epochs but the state is at step " + std::to_string(run.state.step));
  }

  CountingRefresher counter(refresher);
  while (run.state.step < total) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t rounds_before = counter.rounds();
    const auto epoch = static_cast<std::uint32_t>(run.state.step / per_epoch);
    for (std::size_t b = run.state.step % per_epoch; b < per_epoch; ++b) {
      run.state = nag_step(ctx, run.state, batches[b], run.hp.learning_rate, plan, evk, rot, &counter);
      if (hooks.on_step) hooks.on_step(run);
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    run.log.push_back({epoch, static_cast<std::uint32_t>(per_epoch),
                       static_cast<std::uint32_t>(counter.rounds() - rounds_before), took.count()});
    if (hooks.on_epoch) hooks.on_epoch(run);
  }
}

PackedMatrix encrypted_infer(const ckks::Context& ctx, const PackedMatrix& w, const PackedMatrix& x,
                             const ckks::EvaluationKey& evk, const ckks::RotationKeySet& rot) {
  return linalg::matmul(ctx, x, w, evk, rot);
}

void write_checkpoint(ByteWriter& w, const ckks::Context& ctx, const TrainingRun& run) {
  w.magic("HTC1");
  w.u8(kCheckpointVersion);
  write(w, run.hp);
  w.u32(static_cast<std::uint32_t>(run.log.size()));
  for (const auto& e : run.log) {
    w.u32(e.epoch);
    w.u32(e.steps);
    w.u32(e.refresh_rounds);
    w.f64(e.seconds);
  }
  for (const auto* m : {&run.state.w, &run.state.v, &run.state.w_prev}) w.blob(linalg::serialize(ctx, *m));
  w.f64(run.state.lambda);
  w.u64(run.state.step);
}

TrainingRun read_checkpoint(ByteReader& r, const ckks::Context& ctx) {
  r.expect_magic("HTC1");
  if (const auto v = r.u8(); v != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(v));
  }
  TrainingRun run;
  run.hp = read_hyperparams(r);
  const std::uint32_t epochs = r.u32();
  if (epochs > run.hp.epochs) throw FormatError("checkpoint: more epochs logged than configured");
  for (std::uint32_t i = 0; i < epochs; ++i) {
    EpochLog e;
    e.epoch = r.u32();
    e.steps = r.u32();
    e.refresh_rounds = r.u32();
    e.seconds = r.f64();
    run.log.push_back(e);
  }
  for (auto* m : {&run.state.w, &run.state.v, &run.state.w_prev}) *m = linalg::deserialize_packed(r.blob(), ctx);
  run.state.lambda = r.f64();
  run.state.step = r.u64();
  const auto& p = run.state.w.plan;
  for (const auto* m : {&run.state.v, &run.state.w_prev}) {
    if (m->layout != run.state.w.layout || m->plan != p) throw FormatError("checkpoint: W, V, W_prev layouts differ");
  }
  if (run.state.w.layout != linalg::Layout::kColumnReplicated || p.rows != run.hp.feature_dim ||
      p.cols != run.hp.class_count) {
    throw FormatError("checkpoint: weights do not match the hyperparams");
  }
  if (!(run.state.lambda >= 0)) throw FormatError("checkpoint: negative momentum scalar");
  return run;
}

}  // namespace hefine::train
