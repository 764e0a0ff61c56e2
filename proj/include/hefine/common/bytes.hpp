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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hefine/common/error.hpp"

namespace hefine {

using Bytes = std::vector<std::uint8_t>;

static_assert(std::endian::native == std::endian::little,
              "wire formats are little-endian and written with memcpy");

/// Appends little-endian fields to a growing byte buffer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes& out) : out_(&out) {}

  void u8(std::uint8_t v) { buf().push_back(v); }
  void u16(std::uint16_t v) { raw(&v, 2); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void i32(std::int32_t v) { raw(&v, 4); }
  void f32(float v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
  void magic(std::string_view m) { raw(m.data(), m.size()); }
  void bytes(std::span<const std::uint8_t> b) { raw(b.data(), b.size()); }
  /// u64 length prefix followed by the bytes.
  void blob(std::span<const std::uint8_t> b) {
    u64(b.size());
    bytes(b);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void words(std::span<const std::uint64_t> w) { raw(w.data(), w.size() * 8); }

  Bytes take() { return std::move(own_); }
  const Bytes& view() const { return out_ ? *out_ : own_; }

 private:
  Bytes& buf() { return out_ ? *out_ : own_; }
  void raw(const void* p, std::size_t n) {
    auto& b = buf();
    const auto off = b.size();
    b.resize(off + n);
    if (n) std::memcpy(b.data() + off, p, n);
  }

  Bytes own_;
  Bytes* out_ = nullptr;
};

/// Bounds-checked little-endian reader; throws FormatError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, std::string_view what = "buffer")
      : data_(data), what_(what) {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::int32_t i32() { return get<std::int32_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }

  void expect_magic(std::string_view m) {
    auto got = take(m.size());
    if (std::memcmp(got.data(), m.data(), m.size()) != 0) {
      throw FormatError(std::string(what_) + ": bad magic, expected " + std::string(m));
    }
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > remaining()) {
      throw FormatError(std::string(what_) + ": truncated (need " + std::to_string(n) +
                        " bytes, have " + std::to_string(remaining()) + ")");
    }
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> blob() {
    const auto n = u64();
    return take(n);
  }
  std::string str() {
    const auto n = u32();
    auto s = take(n);
    return std::string(reinterpret_cast<const char*>(s.data()), s.size());
  }
  void words(std::span<std::uint64_t> out) {
    auto s = take(out.size() * 8);
    std::memcpy(out.data(), s.data(), s.size());
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  void expect_end() const {
    if (remaining() != 0) {
      throw FormatError(std::string(what_) + ": " + std::to_string(remaining()) +
                        " trailing bytes");
    }
  }

 private:
  template <typename T>
  T get() {
    auto s = take(sizeof(T));
    T v;
    std::memcpy(&v, s.data(), sizeof(T));
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string_view what_;
};

}  // namespace hefine
