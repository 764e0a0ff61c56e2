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
#include <functional>
#include <span>
#include <vector>

#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/ckks/refresh.hpp"
#include "hefine/protocol/messages.hpp"
#include "hefine/protocol/transport.hpp"

namespace hefine::protocol {

/// The key holder's end of a session. Requests are strictly sequential;
/// an ErrorFrame from the cloud surfaces as ProtocolError with its code.
class HospitalClient {
 public:
  /// `refresh_seed` keys the re-encryption randomness (see LocalRefresher).
  HospitalClient(const ckks::Context& ctx, const ckks::KeyBundle& keys, Connection conn,
                 std::uint64_t refresh_seed, std::uint64_t max_payload = kDefaultMaxPayload);

  /// Throws ProtocolError with code 3 when the cloud runs other parameters.
  void hello();
  /// Sends pk, evk and the rotation keys; the secret key stays here.
  void provision();
  void upload(const UploadDataset& data);
  /// Pre-encoded UploadDataset payload (an encrypted dataset file).
  void upload(std::span<const std::uint8_t> payload);

  /// Starts (or resumes) training and serves refresh requests until the
  /// final report arrives; every report is passed to `on_report` and the
  /// final one is returned.
  EpochReport train(const TrainRequest& req, const std::function<void(const EpochReport&)>& on_report = {});

  linalg::PackedMatrix infer(std::uint64_t job_id, const linalg::PackedMatrix& x);

  std::size_t refresh_rounds() const noexcept { return refresher_.rounds(); }
  Connection& connection() noexcept { return conn_; }

 private:
  /// Next frame of `type`; ErrorFrame becomes ProtocolError.
  Frame expect(MsgType type);
  void answer_refresh(const Frame& f);

  const ckks::Context& ctx_;
  const ckks::KeyBundle& keys_;
  Connection conn_;
  ckks::LocalRefresher refresher_;
  std::uint64_t max_payload_;
};

}  // namespace hefine::protocol
