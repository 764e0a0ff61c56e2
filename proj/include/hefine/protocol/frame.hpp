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
#include <optional>
#include <span>
#include <string>

#include "hefine/common/bytes.hpp"
#include "hefine/common/error.hpp"
#include "hefine/protocol/transport.hpp"

namespace hefine::protocol {

// MBT1 frame (little-endian):
//   "MBT1" | version u8 | msg_type u8 | payload_len u64 | payload | crc32 u32
// The CRC (zlib polynomial) covers the payload only.
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 14;
inline constexpr std::size_t kFrameTrailerSize = 4;
inline constexpr std::uint64_t kDefaultMaxPayload = std::uint64_t{1} << 32;

enum class MsgType : std::uint8_t {
  kHello = 1,
  kProvisionKeys = 2,
  kUploadDataset = 3,
  kTrainRequest = 4,
  kRefreshRequest = 5,
  kRefreshResponse = 6,
  kEpochReport = 7,
  kInferRequest = 8,
  kInferResponse = 9,
  kError = 15,
};

bool is_known(std::uint8_t type);

/// Codes carried by ErrorFrame.
enum class ErrorCode : std::uint16_t {
  kBadFrame = 1,        // magic or version; the stream is closed
  kBadChecksum = 2,     // frame dropped, session continues
  kParamsMismatch = 3,  // hello or object under other parameters
  kUnexpected = 4,      // message not valid in the current session state
  kFrameTooLarge = 5,   // payload above the receiver's cap; stream closed
  kUnknownType = 6,
  kMalformed = 7,       // payload failed to decode
  kJobFailed = 8,       // training aborted (state checkpointed when configured)
};

/// A frame-level failure. `fatal` frames leave the stream unusable.
class FrameError : public ProtocolError {
 public:
  FrameError(ErrorCode code, bool fatal, const std::string& what)
      : ProtocolError(static_cast<int>(code), what), fatal_(fatal) {}
  bool fatal() const noexcept { return fatal_; }

 private:
  bool fatal_;
};

struct Frame {
  std::uint8_t type = 0;
  Bytes payload;
};

std::uint32_t crc32(std::span<const std::uint8_t> data);

Bytes encode_frame(std::uint8_t type, std::span<const std::uint8_t> payload);
inline Bytes encode_frame(MsgType type, std::span<const std::uint8_t> payload) {
  return encode_frame(static_cast<std::uint8_t>(type), payload);
}

void write_frame(Connection& conn, MsgType type, std::span<const std::uint8_t> payload);

/// Next frame, or nullopt when the peer closed cleanly between frames.
/// Unknown types are returned as-is for the caller to reject. Throws
/// FrameError for bad magic or version and oversized payloads (fatal) or a
/// CRC mismatch (not fatal: the frame was consumed whole), and
/// ProtocolError when the stream ends mid-frame.
std::optional<Frame> read_frame(Connection& conn, std::uint64_t max_payload = kDefaultMaxPayload);

}  // namespace hefine::protocol
