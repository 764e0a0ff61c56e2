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

#include "hefine/protocol/server.hpp"

#include <cstdio>
#include <optional>

#include "hefine/ckks/serialize.hpp"
#include "hefine/io/features.hpp"
#include "hefine/protocol/messages.hpp"

namespace hefine::protocol {
namespace {

using train::TrainingRun;

void send_error(Connection& conn, ErrorCode code, const std::string& detail) {
  try {
    write_frame(conn, MsgType::kError, encode(ErrorFrame{code, detail}));
  } catch (const ProtocolError&) {
    // The peer is gone; nothing left to tell it.
  }
}

/// Raised inside a session to answer with an ErrorFrame.
struct Reject {
  ErrorCode code;
  std::string detail;
  bool close = false;
};

/// Interactive refresh over the session's own connection: the training
/// step blocks until the hospital answers.
class RemoteRefresher final : public ckks::Refresher {
 public:
  RemoteRefresher(const ckks::Context& ctx, Connection& conn, const ServerConfig& cfg)
      : ctx_(ctx), conn_(conn), cfg_(cfg) {}

  void refresh(std::span<ckks::Ciphertext* const> cts) override {
    RefreshMessage req{++round_, {}};
    for (const auto* ct : cts) req.blobs.push_back(ckks::serialize(ctx_, *ct));
    write_frame(conn_, MsgType::kRefreshRequest, encode(req));
    std::optional<Frame> f;
    try {
      f = read_frame(conn_, cfg_.max_payload);
    } catch (const ProtocolError&) {
      stream_lost = true;
      throw;
    }
    if (!f) {
      stream_lost = true;
      throw ProtocolError(0, "hospital closed the connection during a refresh");
    }
    if (f->type == static_cast<std::uint8_t>(MsgType::kError)) {
      const auto e = decode_error(f->payload);
      throw ProtocolError(static_cast<int>(e.code), "hospital refused the refresh: " + e.detail);
    }
    if (f->type != static_cast<std::uint8_t>(MsgType::kRefreshResponse)) {
      throw ProtocolError(static_cast<int>(ErrorCode::kUnexpected), "expected a refresh response");
    }
    const auto resp = decode_refresh(f->payload);
    if (resp.round != req.round || resp.blobs.size() != cts.size()) {
      throw ProtocolError(static_cast<int>(ErrorCode::kMalformed), "refresh response does not match the request");
    }
    for (std::size_t i = 0; i < cts.size(); ++i) {
      auto ct = ckks::deserialize_ciphertext(resp.blobs[i], ctx_);
      if (ct.level() != ctx_.max_level()) {
        throw ProtocolError(static_cast<int>(ErrorCode::kMalformed), "refreshed ciphertext is not at the top level");
      }
      *cts[i] = std::move(ct);
    }
  }

  bool stream_lost = false;

 private:
  const ckks::Context& ctx_;
  Connection& conn_;
  const ServerConfig& cfg_;
  std::uint32_t round_ = 0;
};

void save_checkpoint(const ckks::Context& ctx, const ServerConfig& cfg, std::uint64_t job, const TrainingRun& run) {
  if (cfg.job_dir.empty()) return;
  ByteWriter w;
  train::write_checkpoint(w, ctx, run);
  const auto path = job_path(cfg.job_dir, job);
  auto tmp = path;
  tmp += ".tmp";
  io::write_file(tmp, w.view());
  std::filesystem::rename(tmp, path);
}

std::optional<TrainingRun> load_checkpoint(const ckks::Context& ctx, const ServerConfig& cfg, std::uint64_t job) {
  if (cfg.job_dir.empty()) return std::nullopt;
  const auto path = job_path(cfg.job_dir, job);
  if (!std::filesystem::exists(path)) return std::nullopt;
  const auto bytes = io::read_file(path);
  ByteReader r(bytes, "checkpoint");
  auto run = train::read_checkpoint(r, ctx);
  r.expect_end();
  return run;
}

class Session {
 public:
  Session(const ckks::Context& ctx, Connection& conn, const ServerConfig& cfg) : ctx_(ctx), conn_(conn), cfg_(cfg) {}

  /// False once the connection must close.
  bool handle(const Frame& f) {
    const auto type = static_cast<MsgType>(f.type);
    if (type == MsgType::kHello) return hello(f);
    if (!greeted_) throw Reject{ErrorCode::kUnexpected, "session must start with a hello"};
    switch (type) {
      case MsgType::kProvisionKeys:
        keys_ = decode_keys(f.payload, ctx_);
        write_frame(conn_, MsgType::kProvisionKeys, {});
        return true;
      case MsgType::kUploadDataset:
        upload(decode_upload(f.payload, ctx_));
        write_frame(conn_, MsgType::kUploadDataset, {});
        return true;
      case MsgType::kTrainRequest:
        return train_job(decode_train(f.payload));
      case MsgType::kInferRequest:
        infer(decode_infer_request(f.payload, ctx_));
        return true;
      default:
        throw Reject{ErrorCode::kUnexpected, "message type " + std::to_string(f.type) + " is not a request"};
    }
  }

 private:
  bool hello(const Frame& f) {
    const auto h = decode_hello(f.payload);
    if (h.params_hash != ctx_.hash() || h.profile != ctx_.params().profile) {
      throw Reject{ErrorCode::kParamsMismatch, "cloud runs other CKKS parameters", true};
    }
    greeted_ = true;
    write_frame(conn_, MsgType::kHello, encode(Hello{ctx_.hash(), ctx_.params().profile}));
    return true;
  }

  void upload(UploadDataset d) {
    switch (d.role) {
      case DatasetRole::kTrain: train_ = std::move(d); break;
      case DatasetRole::kVal: val_ = std::move(d); break;
      case DatasetRole::kTest: test_ = std::move(d); break;
    }
  }

  bool train_job(const TrainRequest& req) {
    if (!keys_ || !train_) throw Reject{ErrorCode::kUnexpected, "training needs provisioned keys and a training set"};
    const auto batches = batches_of(*train_);
    if (req.hp.feature_dim != batches.front().x.cols() || req.hp.class_count != batches.front().y.cols()) {
      throw Reject{ErrorCode::kMalformed, "hyperparams do not match the uploaded training set"};
    }
    TrainingRun run;
    if (req.resume) {
      auto saved = load_checkpoint(ctx_, cfg_, req.job_id);
      if (!saved) throw Reject{ErrorCode::kUnexpected, "no checkpoint for this job"};
      if (!(saved->hp == req.hp)) throw Reject{ErrorCode::kUnexpected, "checkpoint was made with other hyperparams"};
      run = std::move(*saved);
    } else {
      run = {req.hp, {}, train::init_model(ctx_, req.hp, batches.front().x.plan, keys_->pk, req.hp.seed)};
    }

    RemoteRefresher refresher(ctx_, conn_, cfg_);
    train::TrainHooks hooks;
    hooks.on_step = [&](const TrainingRun& r) { save_checkpoint(ctx_, cfg_, req.job_id, r); };
    hooks.on_epoch = [&](const TrainingRun& r) {
      EpochReport rep{r.log.back(), static_cast<std::uint32_t>(r.hp.epochs), {}, {}};
      if (val_) {
        for (const auto& x : val_->x) {
          rep.val_logits.push_back(train::encrypted_infer(ctx_, r.state.w, x, keys_->evk, keys_->rotations));
        }
      }
      write_frame(conn_, MsgType::kEpochReport, encode(ctx_, rep));
    };
    try {
      train::train(ctx_, batches, run, keys_->evk, keys_->rotations, refresher, hooks);
    } catch (const std::exception& e) {
      if (cfg_.log) cfg_.log("job " + std::to_string(req.job_id) + " aborted at step " + std::to_string(run.state.step) + ": " + e.what());
      if (refresher.stream_lost) return false;
      throw Reject{ErrorCode::kJobFailed, std::string("training aborted: ") + e.what()};
    }
    save_checkpoint(ctx_, cfg_, req.job_id, run);
    model_ = run;
    model_job_ = req.job_id;
    EpochReport fin;
    fin.log.epoch = static_cast<std::uint32_t>(run.hp.epochs);
    fin.total_epochs = static_cast<std::uint32_t>(run.hp.epochs);
    fin.weights = run.state.w;
    write_frame(conn_, MsgType::kEpochReport, encode(ctx_, fin));
    return true;
  }

  void infer(const InferRequest& req) {
    if (!keys_) throw Reject{ErrorCode::kUnexpected, "inference needs provisioned keys"};
    std::optional<TrainingRun> model;
    if (model_ && model_job_ == req.job_id) {
      model = model_;
    } else {
      model = load_checkpoint(ctx_, cfg_, req.job_id);
    }
    if (!model) throw Reject{ErrorCode::kUnexpected, "no trained model for this job"};
    if (req.x.cols() != model->state.w.rows() || req.x.plan.padded_cols != model->state.w.plan.padded_cols) {
      throw Reject{ErrorCode::kMalformed, "features do not match the model layout"};
    }
    InferResponse resp{train::encrypted_infer(ctx_, model->state.w, req.x, keys_->evk, keys_->rotations)};
    write_frame(conn_, MsgType::kInferResponse, encode(ctx_, resp));
  }

  const ckks::Context& ctx_;
  Connection& conn_;
  const ServerConfig& cfg_;
  bool greeted_ = false;
  std::optional<ProvisionKeys> keys_;
  std::optional<UploadDataset> train_, val_, test_;
  std::optional<TrainingRun> model_;
  std::uint64_t model_job_ = 0;
};

}  // namespace

std::filesystem::path job_path(const std::filesystem::path& dir, std::uint64_t job_id) {
  char name[32];
  std::snprintf(name, sizeof(name), "job-%016llx.htc", static_cast<unsigned long long>(job_id));
  return dir / name;
}

void serve_session(const ckks::Context& ctx, Connection& conn, const ServerConfig& cfg) {
  if (cfg.tap) conn.tap = cfg.tap;
  Session session(ctx, conn, cfg);
  while (true) {
    std::optional<Frame> f;
    try {
      f = read_frame(conn, cfg.max_payload);
    } catch (const FrameError& e) {
      send_error(conn, static_cast<ErrorCode>(e.code()), e.what());
      if (e.fatal()) return;
      continue;
    } catch (const ProtocolError&) {
      return;
    }
    if (!f) return;
    if (!is_known(f->type)) {
      send_error(conn, ErrorCode::kUnknownType, "unknown message type " + std::to_string(f->type));
      continue;
    }
    try {
      if (!session.handle(*f)) return;
    } catch (const Reject& r) {
      send_error(conn, r.code, r.detail);
      if (r.close) return;
    } catch (const ParamsMismatch& e) {
      send_error(conn, ErrorCode::kParamsMismatch, e.what());
    } catch (const FrameError& e) {
      send_error(conn, static_cast<ErrorCode>(e.code()), e.what());
      if (e.fatal()) return;
    } catch (const ProtocolError&) {
      return;
    } catch (const Error& e) {
      send_error(conn, ErrorCode::kMalformed, e.what());
    } catch (const std::exception& e) {
      if (cfg.log) cfg.log(std::string("session error: ") + e.what());
      send_error(conn, ErrorCode::kJobFailed, e.what());
      return;
    }
  }
}

CloudServer::CloudServer(ckks::ContextPtr ctx, const Address& listen, ServerConfig cfg)
    : ctx_(std::move(ctx)), cfg_(std::move(cfg)), listener_(listen) {}

CloudServer::~CloudServer() { stop(); }

void CloudServer::run() {
  while (!stopping_) {
    auto conn = std::make_shared<Connection>(listener_.accept());
    if (!conn->valid()) break;
    std::lock_guard lock(mu_);
    if (stopping_) break;
    auto it = open_.insert(open_.end(), conn);
    workers_.emplace_back([this, conn, it] {
      serve_session(*ctx_, *conn, cfg_);
      conn->shutdown();
      std::lock_guard l(mu_);
      open_.erase(it);
      ++finished_;
    });
  }
}

void CloudServer::start() {
  loop_ = std::thread([this] { run(); });
}

void CloudServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.shutdown();
  if (loop_.joinable()) loop_.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (auto& c : open_) c->shutdown();
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

}  // namespace hefine::protocol
