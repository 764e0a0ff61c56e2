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
#include <span>

#include "hefine/ckks/ciphertext.hpp"
#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"
#include "hefine/common/bytes.hpp"

namespace hefine::ckks {

// CKX1 object layout (little-endian):
//   "CKX1" | version u8 | params hash u64 | kind u8 | level u8 | poly count u8
//   | round(log2(scale) * 2^16) as i32 | residues
// Residues: for each poly, for each active prime in chain order (base primes
// 0..level-1, then special primes for key material), N u64 words holding
// the coefficient-form residue.

inline constexpr std::uint8_t kCkxVersion = 1;
inline constexpr std::size_t kCkxHeaderSize = 20;

enum class ObjectKind : std::uint8_t {
  kCiphertext = 1,
  kPlaintext = 2,
  kPublicKey = 3,
  kEvaluationKey = 4,
  kRotationKey = 5,
  kSecretKey = 0x53,
};

/// Bytes of a CKX1 object with `polys` polynomials over `primes` residues.
std::size_t ckx_size(std::size_t ring_degree, std::size_t polys, std::size_t primes);

/// The 14-byte prefix ("CKX1", version, hash, kind) that starts every
/// serialized object of `kind` under these parameters; the key-isolation
/// scan searches traffic for the secret-key variant.
Bytes ckx_marker(std::uint64_t params_hash, ObjectKind kind);

void write(ByteWriter& w, const Context& ctx, const Ciphertext& ct);
void write(ByteWriter& w, const Context& ctx, const Plaintext& pt);
void write(ByteWriter& w, const Context& ctx, const PublicKey& pk);
void write(ByteWriter& w, const Context& ctx, const EvaluationKey& evk);
void write(ByteWriter& w, const Context& ctx, const SecretKey& sk);
/// Container: u32 count, then per key an i32 step and a u64-length-prefixed
/// CKX1 rotation-key object.
void write(ByteWriter& w, const Context& ctx, const RotationKeySet& keys);

template <typename T>
Bytes serialize(const Context& ctx, const T& obj) {
  ByteWriter w;
  write(w, ctx, obj);
  return w.take();
}

Ciphertext read_ciphertext(ByteReader& r, const Context& ctx);
Plaintext read_plaintext(ByteReader& r, const Context& ctx);
PublicKey read_public_key(ByteReader& r, const Context& ctx);
EvaluationKey read_evaluation_key(ByteReader& r, const Context& ctx);
SecretKey read_secret_key(ByteReader& r, const Context& ctx);
RotationKeySet read_rotation_keys(ByteReader& r, const Context& ctx);

/// Whole-buffer variants; trailing bytes are a FormatError.
Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes, const Context& ctx);
Plaintext deserialize_plaintext(std::span<const std::uint8_t> bytes, const Context& ctx);
PublicKey deserialize_public_key(std::span<const std::uint8_t> bytes, const Context& ctx);
EvaluationKey deserialize_evaluation_key(std::span<const std::uint8_t> bytes, const Context& ctx);
SecretKey deserialize_secret_key(std::span<const std::uint8_t> bytes, const Context& ctx);
RotationKeySet deserialize_rotation_keys(std::span<const std::uint8_t> bytes, const Context& ctx);

/// Peeks at the params hash of a CKX1 object without decoding it.
std::uint64_t peek_params_hash(std::span<const std::uint8_t> bytes);

}  // namespace hefine::ckks
