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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>

#include "hefine/ckks/context.hpp"
#include "hefine/protocol/frame.hpp"
#include "hefine/protocol/transport.hpp"
#include "hefine/train/trainer.hpp"

namespace hefine::protocol {

struct ServerConfig {
  /// Frames with larger payloads are answered with ErrorFrame code 5 and
  /// the connection is closed.
  std::uint64_t max_payload = kDefaultMaxPayload;
  /// Where training jobs are checkpointed (after every step) and their
  /// final models kept; empty disables both.
  std::filesystem::path job_dir;
  /// Sees every byte any session receives. Called from session threads.
  std::function<void(std::span<const std::uint8_t>)> tap;
  /// Diagnostics, one line per call. Called from session threads.
  std::function<void(const std::string&)> log;
};

/// Path of the checkpoint of `job_id` inside `dir`.
std::filesystem::path job_path(const std::filesystem::path& dir, std::uint64_t job_id);

/// Runs one hospital session on `conn` until the peer closes it or a fatal
/// frame error occurs. Never throws for peer misbehaviour; every rejected
/// message is answered with an ErrorFrame.
void serve_session(const ckks::Context& ctx, Connection& conn, const ServerConfig& cfg);

/// Accept loop serving each session on its own thread. Sessions share
/// nothing but the parameter context and the job directory.
class CloudServer {
 public:
  CloudServer(ckks::ContextPtr ctx, const Address& listen, ServerConfig cfg = {});
  ~CloudServer();
  CloudServer(const CloudServer&) = delete;
  CloudServer& operator=(const CloudServer&) = delete;

  std::uint16_t port() const noexcept { return listener_.port(); }
  /// Blocks until stop().
  void run();
  /// run() on a background thread.
  void start();
  /// Closes the listener and every open session, then joins their threads.
  void stop();
  std::size_t sessions_finished() const noexcept { return finished_.load(); }

 private:
  ckks::ContextPtr ctx_;
  ServerConfig cfg_;
  Listener listener_;
  std::thread loop_;
  std::mutex mu_;
  std::list<std::shared_ptr<Connection>> open_;
  std::list<std::thread> workers_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> finished_{0};
};

}  // namespace hefine::protocol
