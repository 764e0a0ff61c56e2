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
#include <string>

namespace hefine::protocol {

/// "host:port" split; throws InvalidArgument when the port is missing or
/// out of range.
struct Address {
  std::string host;
  std::uint16_t port = 0;

  static Address parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

/// A connected TCP stream with blocking exact reads and writes.
class Connection {
 public:
  Connection() = default;
  explicit Connection(int fd) : fd_(fd) {}
  Connection(Connection&& o) noexcept;
  Connection& operator=(Connection&& o) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  ~Connection();

  /// Throws ProtocolError (code 0) when the peer cannot be reached.
  static Connection connect(const Address& addr);

  /// Fills `out` completely. Returns false if the peer closed the stream
  /// before the first byte; a close part-way through throws ProtocolError.
  bool read_exact(std::span<std::uint8_t> out);
  void write_all(std::span<const std::uint8_t> data);
  /// Unblocks pending reads (from another thread) and ends both directions.
  void shutdown();
  bool valid() const noexcept { return fd_ >= 0; }

  /// Called with every chunk received, before it is parsed.
  std::function<void(std::span<const std::uint8_t>)> tap;

 private:
  void close();
  int fd_ = -1;
};

/// Listening TCP socket.
class Listener {
 public:
  /// Port 0 picks an ephemeral port. Throws ProtocolError on bind failure.
  explicit Listener(const Address& addr);
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  ~Listener();

  std::uint16_t port() const noexcept { return port_; }
  /// Blocks for the next client; returns an invalid Connection once
  /// shutdown() has been called.
  Connection accept();
  void shutdown();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace hefine::protocol
