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

#include "hefine/ckks/serialize.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hefine/common/error.hpp"

namespace hefine::ckks {

using ring::Domain;
using ring::RingPoly;

namespace {

constexpr std::string_view kMagic = "CKX1";

bool is_key_kind(ObjectKind k) {
  return k == ObjectKind::kEvaluationKey || k == ObjectKind::kRotationKey ||
         k == ObjectKind::kSecretKey;
}

std::int32_t scale_to_fixed(double scale) {
  if (scale <= 0) return 0;
  return static_cast<std::int32_t>(std::llround(std::log2(scale) * 65536.0));
}

/// Inverse of scale_to_fixed. Canonical scales (and their squares) are not
/// powers of two, so they are recovered exactly from the level instead of
/// from the 16-bit fraction.
double fixed_to_scale(const Context& ctx, std::int32_t fp, std::size_t level) {
  if (fp == 0) return 0.0;
  const double s = ctx.scale_at(level);
  if (fp == scale_to_fixed(s)) return s;
  if (fp == scale_to_fixed(s * s)) return s * s;
  return std::exp2(static_cast<double>(fp) / 65536.0);
}

void write_object(ByteWriter& w, const Context& ctx, ObjectKind kind,
                  const std::vector<const RingPoly*>& polys, double scale) {
  if (polys.empty() || polys.size() > 255) throw InvalidArgument("CKX1: bad poly count");
  const std::size_t level = polys.front()->level();
  w.magic(kMagic);
  w.u8(kCkxVersion);
  w.u64(ctx.hash());
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(static_cast<std::uint8_t>(level));
  w.u8(static_cast<std::uint8_t>(polys.size()));
  w.i32(scale_to_fixed(scale));
  for (const RingPoly* p : polys) {
    if (p->level() != level) throw InvalidArgument("CKX1: polys at different levels");
    if (p->domain() == Domain::kCoefficient) {
      w.words(p->data());
    } else {
      w.words(ring::ntt_inverse(*p).data());
    }
  }
}

struct Decoded {
  std::size_t level;
  double scale;
  std::vector<RingPoly> polys;
};

Decoded read_object(ByteReader& r, const Context& ctx, ObjectKind expected) {
  r.expect_magic(kMagic);
  const auto version = r.u8();
  if (version != kCkxVersion) throw FormatError("CKX1: unsupported version " + std::to_string(version));
  const auto hash = r.u64();
  if (hash != ctx.hash()) throw ParamsMismatch("CKX1: object was produced under other parameters");
  const auto kind = static_cast<ObjectKind>(r.u8());
  if (kind != expected) {
    throw FormatError("CKX1: expected object kind " + std::to_string(static_cast<int>(expected)) +
                      ", found " + std::to_string(static_cast<int>(kind)));
  }
  const std::size_t level = r.u8();
  const std::size_t count = r.u8();
  const std::int32_t fp = r.i32();
  if (level == 0 || level > ctx.max_level()) throw FormatError("CKX1: level out of range");
  if (count == 0) throw FormatError("CKX1: no polynomials");
  const bool extended = is_key_kind(kind);
  Decoded d{level, fixed_to_scale(ctx, fp, level), {}};
  d.polys.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RingPoly p(ctx.basis(), level, Domain::kCoefficient, extended);
    r.words(p.data());
    for (std::size_t k = 0; k < p.prime_count(); ++k) {
      const u64 q = p.field(k).value();
      for (u64 v : p.residue(k)) {
        if (v >= q) throw FormatError("CKX1: residue not reduced modulo its prime");
      }
    }
    ring::ntt_forward_inplace(p);
    d.polys.push_back(std::move(p));
  }
  return d;
}

std::vector<const RingPoly*> switching_polys(const SwitchingKey& k) {
  std::vector<const RingPoly*> out;
  for (std::size_t j = 0; j < k.b.size(); ++j) {
    out.push_back(&k.b[j]);
    out.push_back(&k.a[j]);
  }
  return out;
}

SwitchingKey switching_from(Decoded&& d, const Context& ctx) {
  if (d.level != ctx.max_level() || d.polys.size() != 2 * ctx.digit_count(ctx.max_level())) {
    throw FormatError("CKX1: switching key shape does not match parameters");
  }
  SwitchingKey k;
  for (std::size_t j = 0; j < d.polys.size(); j += 2) {
    k.b.push_back(std::move(d.polys[j]));
    k.a.push_back(std::move(d.polys[j + 1]));
  }
  return k;
}

template <typename F>
auto whole(std::span<const std::uint8_t> bytes, F&& f) {
  ByteReader r(bytes, "CKX1");
  auto v = f(r);
  r.expect_end();
  return v;
}

}  // namespace

std::size_t ckx_size(std::size_t ring_degree, std::size_t polys, std::size_t primes) {
  return kCkxHeaderSize + polys * primes * ring_degree * 8;
}

Bytes ckx_marker(std::uint64_t params_hash, ObjectKind kind) {
  ByteWriter w;
  w.magic(kMagic);
  w.u8(kCkxVersion);
  w.u64(params_hash);
  w.u8(static_cast<std::uint8_t>(kind));
  return w.take();
}

void write(ByteWriter& w, const Context& ctx, const Ciphertext& ct) {
  std::vector<const RingPoly*> polys;
  for (const auto& p : ct.polys) polys.push_back(&p);
  write_object(w, ctx, ObjectKind::kCiphertext, polys, ct.scale);
}

void write(ByteWriter& w, const Context& ctx, const Plaintext& pt) {
  write_object(w, ctx, ObjectKind::kPlaintext, {&pt.poly}, pt.scale);
}

void write(ByteWriter& w, const Context& ctx, const PublicKey& pk) {
  write_object(w, ctx, ObjectKind::kPublicKey, {&pk.b, &pk.a}, 0.0);
}

void write(ByteWriter& w, const Context& ctx, const EvaluationKey& evk) {
  write_object(w, ctx, ObjectKind::kEvaluationKey, switching_polys(evk.key), 0.0);
}

void write(ByteWriter& w, const Context& ctx, const SecretKey& sk) {
  write_object(w, ctx, ObjectKind::kSecretKey, {&sk.s}, 0.0);
}

void write(ByteWriter& w, const Context& ctx, const RotationKeySet& keys) {
  w.u32(static_cast<std::uint32_t>(keys.keys.size()));
  for (const auto& [step, key] : keys.keys) {
    w.i32(static_cast<std::int32_t>(step));
    w.u64(ckx_size(ctx.degree(), 2 * key.b.size(), ctx.max_level() + ctx.digit_size()));
    write_object(w, ctx, ObjectKind::kRotationKey, switching_polys(key), 0.0);
  }
}

Ciphertext read_ciphertext(ByteReader& r, const Context& ctx) {
  Decoded d = read_object(r, ctx, ObjectKind::kCiphertext);
  if (d.polys.size() > 3 || d.polys.size() < 2) throw FormatError("CKX1: ciphertext needs 2 or 3 polys");
  if (!(d.scale > 0)) throw FormatError("CKX1: ciphertext scale must be positive");
  return Ciphertext{std::move(d.polys), d.scale};
}

Plaintext read_plaintext(ByteReader& r, const Context& ctx) {
  Decoded d = read_object(r, ctx, ObjectKind::kPlaintext);
  if (d.polys.size() != 1) throw FormatError("CKX1: plaintext needs 1 poly");
  return Plaintext{std::move(d.polys[0]), d.scale};
}

PublicKey read_public_key(ByteReader& r, const Context& ctx) {
  Decoded d = read_object(r, ctx, ObjectKind::kPublicKey);
  if (d.polys.size() != 2 || d.level != ctx.max_level()) throw FormatError("CKX1: bad public key shape");
  return PublicKey{std::move(d.polys[0]), std::move(d.polys[1]), ctx.hash()};
}

EvaluationKey read_evaluation_key(ByteReader& r, const Context& ctx) {
  return EvaluationKey{switching_from(read_object(r, ctx, ObjectKind::kEvaluationKey), ctx), ctx.hash()};
}

SecretKey read_secret_key(ByteReader& r, const Context& ctx) {
  Decoded d = read_object(r, ctx, ObjectKind::kSecretKey);
  if (d.polys.size() != 1 || d.level != ctx.max_level()) throw FormatError("CKX1: bad secret key shape");
  return SecretKey{std::move(d.polys[0]), ctx.hash()};
}

RotationKeySet read_rotation_keys(ByteReader& r, const Context& ctx) {
  RotationKeySet set;
  set.params_hash = ctx.hash();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const long step = r.i32();
    if (step != normalize_step(step, ctx.slot_count()) || step == 0) {
      throw FormatError("rotation key step " + std::to_string(step) + " is not normalised");
    }
    ByteReader inner(r.blob(), "rotation key");
    set.keys[step] = switching_from(read_object(inner, ctx, ObjectKind::kRotationKey), ctx);
    inner.expect_end();
  }
  return set;
}

Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> b, const Context& ctx) {
  return whole(b, [&](ByteReader& r) { return read_ciphertext(r, ctx); });
}
Plaintext deserialize_plaintext(std::span<const std::uint8_t> b, const Context& ctx) {
  return whole(b, [&](ByteReader& r) { return read_plaintext(r, ctx); });
}
PublicKey deserialize_public_key(std::span<const std::uint8_t> b, const Context& ctx) {
  return whole(b, [&](ByteReader& r) { return read_public_key(r, ctx); });
}
EvaluationKey deserialize_evaluation_key(std::span<const std::uint8_t> b, const Context& ctx) {
  return whole(b, [&](ByteReader& r) { return read_evaluation_key(r, ctx); });
}
SecretKey deserialize_secret_key(std::span<const std::uint8_t> b, const Context& ctx) {
  return whole(b, [&](ByteReader& r) { return read_secret_key(r, ctx); });
}
RotationKeySet deserialize_rotation_keys(std::span<const std::uint8_t> b, const Context& ctx) {
  return whole(b, [&](ByteReader& r) { return read_rotation_keys(r, ctx); });
}

std::uint64_t peek_params_hash(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "CKX1");
  r.expect_magic(kMagic);
  r.u8();
  return r.u64();
}

}  // namespace hefine::ckks
