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

#include "hefine/protocol/hospital.hpp"

#include "hefine/ckks/serialize.hpp"

namespace hefine::protocol {

HospitalClient::HospitalClient(const ckks::Context& ctx, const ckks::KeyBundle& keys, Connection conn,
                               std::uint64_t refresh_seed, std::uint64_t max_payload)
    : ctx_(ctx), keys_(keys), conn_(std::move(conn)), refresher_(ctx, keys.sk, refresh_seed),
      max_payload_(max_payload) {}

Frame HospitalClient::expect(MsgType type) {
  auto f = read_frame(conn_, max_payload_);
  if (!f) throw ProtocolError(0, "cloud closed the connection");
  if (f->type == static_cast<std::uint8_t>(MsgType::kError)) {
    const auto e = decode_error(f->payload);
    throw ProtocolError(static_cast<int>(e.code), "cloud error " + std::to_string(static_cast<int>(e.code)) + ": " + e.detail);
  }
  if (f->type != static_cast<std::uint8_t>(type)) {
    throw ProtocolError(static_cast<int>(ErrorCode::kUnexpected),
                        "expected message type " + std::to_string(static_cast<int>(type)) + ", got " +
                            std::to_string(f->type));
  }
  return std::move(*f);
}

void HospitalClient::hello() {
  write_frame(conn_, MsgType::kHello, encode(Hello{ctx_.hash(), ctx_.params().profile}));
  const auto reply = decode_hello(expect(MsgType::kHello).payload);
  if (reply.params_hash != ctx_.hash()) {
    throw ProtocolError(static_cast<int>(ErrorCode::kParamsMismatch), "cloud answered with other parameters");
  }
}

void HospitalClient::provision() {
  ProvisionKeys m{keys_.pk, keys_.evk, keys_.rotations};
  write_frame(conn_, MsgType::kProvisionKeys, encode(ctx_, m));
  expect(MsgType::kProvisionKeys);
}

void HospitalClient::upload(const UploadDataset& data) { upload(encode(ctx_, data)); }

void HospitalClient::upload(std::span<const std::uint8_t> payload) {
  write_frame(conn_, MsgType::kUploadDataset, payload);
  expect(MsgType::kUploadDataset);
}

void HospitalClient::answer_refresh(const Frame& f) {
  auto msg = decode_refresh(f.payload);
  std::vector<ckks::Ciphertext> cts;
  cts.reserve(msg.blobs.size());
  try {
    for (const auto& b : msg.blobs) cts.push_back(ckks::deserialize_ciphertext(b, ctx_));
  } catch (const Error& e) {
    const auto code = dynamic_cast<const ParamsMismatch*>(&e) ? ErrorCode::kParamsMismatch : ErrorCode::kMalformed;
    write_frame(conn_, MsgType::kError, encode(ErrorFrame{code, e.what()}));
    throw ProtocolError(static_cast<int>(code), std::string("refusing refresh: ") + e.what());
  }
  std::vector<ckks::Ciphertext*> ptrs;
  for (auto& ct : cts) ptrs.push_back(&ct);
  refresher_.refresh(ptrs);
  for (std::size_t i = 0; i < cts.size(); ++i) msg.blobs[i] = ckks::serialize(ctx_, cts[i]);
  write_frame(conn_, MsgType::kRefreshResponse, encode(msg));
}

EpochReport HospitalClient::train(const TrainRequest& req, const std::function<void(const EpochReport&)>& on_report) {
  write_frame(conn_, MsgType::kTrainRequest, encode(req));
  while (true) {
    auto f = read_frame(conn_, max_payload_);
    if (!f) throw ProtocolError(0, "cloud closed the connection during training");
    switch (static_cast<MsgType>(f->type)) {
      case MsgType::kRefreshRequest:
        answer_refresh(*f);
        break;
      case MsgType::kEpochReport: {
        auto rep = decode_report(f->payload, ctx_);
        if (on_report) on_report(rep);
        if (rep.final()) return rep;
        break;
      }
      case MsgType::kError: {
        const auto e = decode_error(f->payload);
        throw ProtocolError(static_cast<int>(e.code), "cloud error " + std::to_string(static_cast<int>(e.code)) + ": " + e.detail);
      }
      default:
        throw ProtocolError(static_cast<int>(ErrorCode::kUnexpected),
                            "unexpected message type " + std::to_string(f->type) + " during training");
    }
  }
}

linalg::PackedMatrix HospitalClient::infer(std::uint64_t job_id, const linalg::PackedMatrix& x) {
  write_frame(conn_, MsgType::kInferRequest, encode(ctx_, InferRequest{job_id, x}));
  return decode_infer_response(expect(MsgType::kInferResponse).payload, ctx_).logits;
}

}  // namespace hefine::protocol
