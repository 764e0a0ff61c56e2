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

#include "hefine/protocol/frame.hpp"

#include <zlib.h>

#include <array>
#include <cstring>

namespace hefine::protocol {

bool is_known(std::uint8_t type) { return (type >= 1 && type <= 9) || type == 15; }

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < data.size(); off += kChunk) {
    const auto n = std::min(kChunk, data.size() - off);
    crc = ::crc32(crc, data.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

Bytes encode_frame(std::uint8_t type, std::span<const std::uint8_t> payload) {
  Bytes out;
  out.reserve(kFrameHeaderSize + payload.size() + kFrameTrailerSize);
  ByteWriter w(out);
  w.magic("MBT1");
  w.u8(kFrameVersion);
  w.u8(type);
  w.u64(payload.size());
  w.bytes(payload);
  w.u32(crc32(payload));
  return out;
}

void write_frame(Connection& conn, MsgType type, std::span<const std::uint8_t> payload) {
  std::array<std::uint8_t, kFrameHeaderSize> head{};
  std::memcpy(head.data(), "MBT1", 4);
  head[4] = kFrameVersion;
  head[5] = static_cast<std::uint8_t>(type);
  const std::uint64_t len = payload.size();
  std::memcpy(head.data() + 6, &len, 8);
  const std::uint32_t crc = crc32(payload);
  conn.write_all(head);
  conn.write_all(payload);
  conn.write_all(std::span(reinterpret_cast<const std::uint8_t*>(&crc), 4));
}

std::optional<Frame> read_frame(Connection& conn, std::uint64_t max_payload) {
  std::array<std::uint8_t, kFrameHeaderSize> head{};
  if (!conn.read_exact(head)) return std::nullopt;
  if (std::memcmp(head.data(), "MBT1", 4) != 0) throw FrameError(ErrorCode::kBadFrame, true, "bad frame magic");
  if (head[4] != kFrameVersion) {
    throw FrameError(ErrorCode::kBadFrame, true, "unsupported frame version " + std::to_string(head[4]));
  }
  std::uint64_t len = 0;
  std::memcpy(&len, head.data() + 6, 8);
  if (len > max_payload) {
    throw FrameError(ErrorCode::kFrameTooLarge, true,
                     "payload of " + std::to_string(len) + " bytes exceeds the cap of " + std::to_string(max_payload));
  }
  Frame f;
  f.type = head[5];
  f.payload.resize(len);
  std::array<std::uint8_t, 4> trailer{};
  if (!conn.read_exact(f.payload) || !conn.read_exact(trailer)) {
    throw ProtocolError(0, "peer closed the connection mid-frame");
  }
  std::uint32_t crc = 0;
  std::memcpy(&crc, trailer.data(), 4);
  if (crc != crc32(f.payload)) throw FrameError(ErrorCode::kBadChecksum, false, "payload checksum mismatch");
  return f;
}

}  // namespace hefine::protocol
