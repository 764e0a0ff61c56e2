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

#include "hefine/protocol/messages.hpp"

#include "hefine/approx/softmax.hpp"
#include "hefine/ckks/serialize.hpp"

namespace hefine::protocol {
namespace {

void put_pmx(ByteWriter& w, const ckks::Context& ctx, const linalg::PackedMatrix& m) {
  w.blob(linalg::serialize(ctx, m));
}

linalg::PackedMatrix get_pmx(ByteReader& r, const ckks::Context& ctx) {
  return linalg::deserialize_packed(r.blob(), ctx);
}

}  // namespace

Bytes encode(const Hello& m) {
  ByteWriter w;
  w.u64(m.params_hash);
  w.u8(static_cast<std::uint8_t>(m.profile));
  return w.take();
}

Hello decode_hello(std::span<const std::uint8_t> p) {
  ByteReader r(p, "Hello");
  Hello m;
  m.params_hash = r.u64();
  const auto profile = r.u8();
  if (profile > 1) throw FormatError("Hello: unknown profile " + std::to_string(profile));
  m.profile = static_cast<ckks::SecurityProfile>(profile);
  r.expect_end();
  return m;
}

Bytes encode(const ckks::Context& ctx, const ProvisionKeys& m) {
  ByteWriter w;
  w.blob(ckks::serialize(ctx, m.pk));
  w.blob(ckks::serialize(ctx, m.evk));
  w.blob(ckks::serialize(ctx, m.rotations));
  return w.take();
}

ProvisionKeys decode_keys(std::span<const std::uint8_t> p, const ckks::Context& ctx) {
  ByteReader r(p, "ProvisionKeys");
  ProvisionKeys m;
  m.pk = ckks::deserialize_public_key(r.blob(), ctx);
  m.evk = ckks::deserialize_evaluation_key(r.blob(), ctx);
  m.rotations = ckks::deserialize_rotation_keys(r.blob(), ctx);
  r.expect_end();
  return m;
}

Bytes encode(const ckks::Context& ctx, const UploadDataset& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(m.role));
  w.u32(static_cast<std::uint32_t>(m.x.size()));
  for (std::size_t i = 0; i < m.x.size(); ++i) {
    const bool labels = i < m.y.size();
    w.u8(labels ? 1 : 0);
    put_pmx(w, ctx, m.x[i]);
    if (labels) put_pmx(w, ctx, m.y[i]);
  }
  return w.take();
}

UploadDataset decode_upload(std::span<const std::uint8_t> p, const ckks::Context& ctx) {
  ByteReader r(p, "UploadDataset");
  UploadDataset m;
  const auto role = r.u8();
  if (role > 2) throw FormatError("UploadDataset: unknown role " + std::to_string(role));
  m.role = static_cast<DatasetRole>(role);
  const auto count = r.u32();
  if (count == 0) throw FormatError("UploadDataset: no batches");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto has_y = r.u8();
    if (has_y > 1) throw FormatError("UploadDataset: bad label flag");
    if ((has_y == 1) != (m.role == DatasetRole::kTrain)) {
      throw FormatError("UploadDataset: labels travel with training batches only");
    }
    m.x.push_back(get_pmx(r, ctx));
    if (m.x.back().layout != linalg::Layout::kRowMajor) throw FormatError("UploadDataset: features must be row-major");
    if (m.x.back().plan.padded_cols != m.x.front().plan.padded_cols || m.x.back().cols() != m.x.front().cols()) {
      throw FormatError("UploadDataset: batches disagree on the feature layout");
    }
    if (has_y) {
      m.y.push_back(get_pmx(r, ctx));
      if (m.y.back().layout != linalg::Layout::kRowMajor ||
          m.y.back().plan != train::label_plan(m.y.back().cols(), m.x.back().plan)) {
        throw FormatError("UploadDataset: labels are not packed alongside the features");
      }
      if (m.y.back().cols() != m.y.front().cols()) throw FormatError("UploadDataset: class counts differ");
    }
  }
  r.expect_end();
  return m;
}

std::vector<train::EncBatch> batches_of(const UploadDataset& m) {
  std::vector<train::EncBatch> out;
  for (std::size_t i = 0; i < m.y.size(); ++i) out.push_back({m.x[i], m.y[i]});
  return out;
}

Bytes encode(const TrainRequest& m) {
  ByteWriter w;
  train::write(w, m.hp);
  w.u64(approx::config_hash(m.hp.softmax));
  w.u64(m.job_id);
  w.u8(m.resume ? 1 : 0);
  return w.take();
}

TrainRequest decode_train(std::span<const std::uint8_t> p) {
  ByteReader r(p, "TrainRequest");
  TrainRequest m;
  m.hp = train::read_hyperparams(r);
  if (r.u64() != approx::config_hash(m.hp.softmax)) throw FormatError("TrainRequest: softmax config hash mismatch");
  m.job_id = r.u64();
  const auto resume = r.u8();
  if (resume > 1) throw FormatError("TrainRequest: bad resume flag");
  m.resume = resume == 1;
  r.expect_end();
  return m;
}

Bytes encode(const RefreshMessage& m) {
  ByteWriter w;
  w.u32(m.round);
  w.u32(static_cast<std::uint32_t>(m.blobs.size()));
  for (const auto& b : m.blobs) w.blob(b);
  return w.take();
}

RefreshMessage decode_refresh(std::span<const std::uint8_t> p) {
  ByteReader r(p, "Refresh");
  RefreshMessage m;
  m.round = r.u32();
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto b = r.blob();
    m.blobs.emplace_back(b.begin(), b.end());
  }
  r.expect_end();
  return m;
}

Bytes encode(const ckks::Context& ctx, const EpochReport& m) {
  ByteWriter w;
  w.u32(m.log.epoch);
  w.u32(m.total_epochs);
  w.u32(m.log.steps);
  w.u32(m.log.refresh_rounds);
  w.f64(m.log.seconds);
  const std::uint8_t flags = (m.val_logits.empty() ? 0 : 1) | (m.weights ? 2 : 0);
  w.u8(flags);
  if (flags & 1) {
    w.u32(static_cast<std::uint32_t>(m.val_logits.size()));
    for (const auto& v : m.val_logits) put_pmx(w, ctx, v);
  }
  if (m.weights) put_pmx(w, ctx, *m.weights);
  return w.take();
}

EpochReport decode_report(std::span<const std::uint8_t> p, const ckks::Context& ctx) {
  ByteReader r(p, "EpochReport");
  EpochReport m;
  m.log.epoch = r.u32();
  m.total_epochs = r.u32();
  m.log.steps = r.u32();
  m.log.refresh_rounds = r.u32();
  m.log.seconds = r.f64();
  const auto flags = r.u8();
  if (flags > 3) throw FormatError("EpochReport: unknown flags");
  if (flags & 1) {
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) m.val_logits.push_back(get_pmx(r, ctx));
  }
  if (flags & 2) m.weights = get_pmx(r, ctx);
  r.expect_end();
  return m;
}

Bytes encode(const ckks::Context& ctx, const InferRequest& m) {
  ByteWriter w;
  w.u64(m.job_id);
  put_pmx(w, ctx, m.x);
  return w.take();
}

InferRequest decode_infer_request(std::span<const std::uint8_t> p, const ckks::Context& ctx) {
  ByteReader r(p, "InferRequest");
  InferRequest m;
  m.job_id = r.u64();
  m.x = get_pmx(r, ctx);
  r.expect_end();
  return m;
}

Bytes encode(const ckks::Context& ctx, const InferResponse& m) {
  ByteWriter w;
  put_pmx(w, ctx, m.logits);
  return w.take();
}

InferResponse decode_infer_response(std::span<const std::uint8_t> p, const ckks::Context& ctx) {
  ByteReader r(p, "InferResponse");
  InferResponse m{get_pmx(r, ctx)};
  r.expect_end();
  return m;
}

Bytes encode(const ErrorFrame& m) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(m.code));
  w.str(m.detail);
  return w.take();
}

ErrorFrame decode_error(std::span<const std::uint8_t> p) {
  ByteReader r(p, "ErrorFrame");
  ErrorFrame m;
  m.code = static_cast<ErrorCode>(r.u16());
  m.detail = r.str();
  r.expect_end();
  return m;
}

}  // namespace hefine::protocol
