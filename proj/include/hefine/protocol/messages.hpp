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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/params.hpp"
#include "hefine/common/bytes.hpp"
#include "hefine/linalg/packing.hpp"
#include "hefine/protocol/frame.hpp"
#include "hefine/train/hyperparams.hpp"
#include "hefine/train/trainer.hpp"

namespace hefine::protocol {

// Payload layouts (little-endian). "blob" is a u64 length followed by the
// bytes; PMX1 and CKX1 objects always travel as blobs.

/// params_hash u64 | profile u8. The server answers with its own hello.
struct Hello {
  std::uint64_t params_hash = 0;
  ckks::SecurityProfile profile = ckks::SecurityProfile::kTest;
};

/// pk blob | evk blob | rotation key container blob. The server answers
/// with an empty ProvisionKeys frame.
struct ProvisionKeys {
  ckks::PublicKey pk;
  ckks::EvaluationKey evk;
  ckks::RotationKeySet rotations;
};

enum class DatasetRole : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

/// role u8 | batch count u32 | per batch: has_labels u8, X blob, [Y blob].
/// Labels are required for the training role and absent otherwise. The
/// server answers with an empty UploadDataset frame. The same bytes are
/// the on-disk encrypted dataset file.
struct UploadDataset {
  DatasetRole role = DatasetRole::kTrain;
  std::vector<linalg::PackedMatrix> x;
  std::vector<linalg::PackedMatrix> y;  // empty unless role is kTrain
};

/// hyperparams | softmax config hash u64 | job id u64 | resume u8.
struct TrainRequest {
  train::Hyperparams hp;
  std::uint64_t job_id = 0;
  bool resume = false;
};

/// round u32 | count u32 | count CKX1 ciphertext blobs. The response
/// carries the same round number and count.
struct RefreshMessage {
  std::uint32_t round = 0;
  std::vector<Bytes> blobs;
};

/// epoch u32 | total epochs u32 | steps u32 | refresh rounds u32 |
/// seconds f64 | flags u8 (1: validation logits, 2: final weights)
/// | [u32 count + PMX1 blobs] | [PMX1 W]. One report per finished epoch,
/// then a final report (epoch == total epochs) carrying the weights.
struct EpochReport {
  train::EpochLog log;
  std::uint32_t total_epochs = 0;
  std::vector<linalg::PackedMatrix> val_logits;
  std::optional<linalg::PackedMatrix> weights;

  bool final() const noexcept { return weights.has_value(); }
};

/// job id u64 | PMX1 X. Uses the model trained in this session, else the
/// final checkpoint stored for the job.
struct InferRequest {
  std::uint64_t job_id = 0;
  linalg::PackedMatrix x;
};

/// PMX1 logits.
struct InferResponse {
  linalg::PackedMatrix logits;
};

/// code u16 | detail (u32 length + UTF-8).
struct ErrorFrame {
  ErrorCode code = ErrorCode::kUnexpected;
  std::string detail;
};

Bytes encode(const Hello& m);
Bytes encode(const ckks::Context& ctx, const ProvisionKeys& m);
Bytes encode(const ckks::Context& ctx, const UploadDataset& m);
Bytes encode(const TrainRequest& m);
Bytes encode(const RefreshMessage& m);
Bytes encode(const ckks::Context& ctx, const EpochReport& m);
Bytes encode(const ckks::Context& ctx, const InferRequest& m);
Bytes encode(const ckks::Context& ctx, const InferResponse& m);
Bytes encode(const ErrorFrame& m);

// Decoders consume the whole payload; FormatError on malformed bytes,
// ParamsMismatch for objects made under other parameters.
Hello decode_hello(std::span<const std::uint8_t> p);
ProvisionKeys decode_keys(std::span<const std::uint8_t> p, const ckks::Context& ctx);
UploadDataset decode_upload(std::span<const std::uint8_t> p, const ckks::Context& ctx);
TrainRequest decode_train(std::span<const std::uint8_t> p);
RefreshMessage decode_refresh(std::span<const std::uint8_t> p);
EpochReport decode_report(std::span<const std::uint8_t> p, const ckks::Context& ctx);
InferRequest decode_infer_request(std::span<const std::uint8_t> p, const ckks::Context& ctx);
InferResponse decode_infer_response(std::span<const std::uint8_t> p, const ckks::Context& ctx);
ErrorFrame decode_error(std::span<const std::uint8_t> p);

/// Training batches of an upload (role kTrain).
std::vector<train::EncBatch> batches_of(const UploadDataset& m);

}  // namespace hefine::protocol
