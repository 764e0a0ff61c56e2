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

#include "hefine/ckks/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hefine/ckks/encoder.hpp"
#include "hefine/common/error.hpp"
#include "hefine/ring/kernels.hpp"
#include "hefine/ring/sampling.hpp"

namespace hefine::ckks {

using ring::Domain;
using ring::RingPoly;

namespace {

thread_local RotationLog* g_rotation_log = nullptr;

/// Leading `level` base-prime rows of p (works for extended key polys).
RingPoly base_prefix(const RingPoly& p, std::size_t level) {
  RingPoly out(p.basis_ptr(), level, p.domain());
  std::copy_n(p.data().begin(), out.data().size(), out.data().begin());
  return out;
}

void require_same_level(const Ciphertext& a, std::size_t level, const char* what) {
  if (a.level() != level) {
    throw DomainMismatch(std::string(what) + ": level mismatch (" + std::to_string(a.level()) +
                         " vs " + std::to_string(level) + ")");
  }
}

void require_same_scale(double a, double b, const char* what) {
  if (a != b) {
    throw ScaleMismatch(std::string(what) + ": scales differ (log2 " + std::to_string(std::log2(a)) +
                        " vs " + std::to_string(std::log2(b)) + ")");
  }
}

void require_linear(const Ciphertext& a, const char* what) {
  if (a.size() != 2) throw InvalidArgument(std::string(what) + ": expects a 2-poly ciphertext");
}

double log2_modulus(const Context& ctx, std::size_t level) {
  double bits = 0;
  for (std::size_t i = 0; i < level; ++i) bits += std::log2(static_cast<double>(ctx.last_prime(i + 1)));
  return bits;
}

void check_scale_fits(const Context& ctx, double scale, std::size_t level) {
  if (std::log2(scale) >= log2_modulus(ctx, level) - 2) {
    throw LevelExhausted("scale 2^" + std::to_string(std::log2(scale)) +
                         " does not fit the modulus at level " + std::to_string(level));
  }
}

/// round(x / P) for an extended NTT poly x; returns a level-l NTT poly over
/// the base primes.
RingPoly mod_down(const Context& ctx, const RingPoly& x) {
  const std::size_t l = x.level();
  const std::size_t n = ctx.degree();
  const std::size_t K = ctx.digit_size();
  const ring::Kernels& kern = ring::kernels();
  std::vector<u64> special(K * n);
  for (std::size_t k = 0; k < K; ++k) {
    std::copy_n(x.residue(l + k).begin(), n, special.begin() + k * n);
    kern.ntt_inverse(special.data() + k * n, x.field(l + k).ntt);
  }
  std::vector<u64> conv(l * n);
  ctx.mod_down(l).convert_centered(special, conv, n);
  RingPoly out(x.basis_ptr(), l, Domain::kNtt);
  const auto p_inv = ctx.special_product_inv_mod_base();
  for (std::size_t i = 0; i < l; ++i) {
    const auto& f = out.field(i);
    u64* c = conv.data() + i * n;
    kern.ntt_forward(c, f.ntt);
    u64* dst = out.residue(i).data();
    kern.sub(x.residue(i).data(), c, dst, n, f.value());
    kern.mul_scalar(dst, p_inv[i], f.modulus.shoup(p_inv[i]), dst, n, f.value());
  }
  return out;
}

Ciphertext rotate_single(const Context& ctx, const Ciphertext& a, long step,
                         const SwitchingKey& key) {
  const std::uint64_t g = ctx.galois_element(step);
  RingPoly c0 = ring::automorphism(a.polys[0], g);
  const RingPoly c1 = ring::automorphism(a.polys[1], g);
  auto [k0, k1] = key_switch(ctx, c1, key);
  ring::add_inplace(c0, k0);
  if (g_rotation_log) g_rotation_log->record(step);
  return Ciphertext{{std::move(c0), std::move(k1)}, a.scale};
}

/// Non-adjacent form of k: signed powers of two, least significant first.
std::vector<long> naf_terms(long k) {
  std::vector<long> out;
  long bit = 1;
  while (k != 0) {
    if (k & 1) {
      const long digit = 2 - (((k % 4) + 4) % 4);  // +1 or -1
      out.push_back(digit * bit);
      k -= digit;
    }
    k /= 2;
    bit *= 2;
  }
  return out;
}

}  // namespace

RotationLog::RotationLog() : previous_(g_rotation_log) { g_rotation_log = this; }
RotationLog::~RotationLog() { g_rotation_log = previous_; }

Ciphertext encrypt_pk(const Context& ctx, const Plaintext& pt, const PublicKey& pk, Prng& rng) {
  if (pk.params_hash != ctx.hash()) throw ParamsMismatch("public key belongs to other parameters");
  const std::size_t l = pt.level();
  if (l > pk.b.level()) throw InvalidArgument("plaintext level exceeds key level");
  const auto& basis = ctx.basis();
  RingPoly u = ring::sample_ternary(basis, l, ctx.degree() / 2, rng);
  RingPoly e0 = ring::sample_gaussian(basis, l, ctx.params().sigma, rng);
  RingPoly e1 = ring::sample_gaussian(basis, l, ctx.params().sigma, rng);
  ring::ntt_forward_inplace(u);
  ring::ntt_forward_inplace(e0);
  ring::ntt_forward_inplace(e1);
  RingPoly c0 = ring::poly_mul(u, base_prefix(pk.b, l));
  RingPoly c1 = ring::poly_mul(u, base_prefix(pk.a, l));
  ring::add_inplace(c0, e0);
  ring::add_inplace(c0, pt.poly);
  ring::add_inplace(c1, e1);
  return Ciphertext{{std::move(c0), std::move(c1)}, pt.scale};
}

Ciphertext encrypt_sk(const Context& ctx, const Plaintext& pt, const SecretKey& sk, Prng& rng) {
  if (sk.params_hash != ctx.hash()) throw ParamsMismatch("secret key belongs to other parameters");
  const std::size_t l = pt.level();
  RingPoly a = ring::sample_uniform(ctx.basis(), l, rng, Domain::kNtt);
  RingPoly e = ring::sample_gaussian(ctx.basis(), l, ctx.params().sigma, rng);
  ring::ntt_forward_inplace(e);
  RingPoly c0 = ring::poly_sub(e, ring::poly_mul(a, base_prefix(sk.s, l)));
  ring::add_inplace(c0, pt.poly);
  return Ciphertext{{std::move(c0), std::move(a)}, pt.scale};
}

Plaintext decrypt(const Context& ctx, const Ciphertext& ct, const SecretKey& sk) {
  if (sk.params_hash != ctx.hash()) throw ParamsMismatch("secret key belongs to other parameters");
  if (ct.size() == 3) throw InvalidArgument("decrypt: relinearize the ciphertext first");
  require_linear(ct, "decrypt");
  RingPoly m = ct.polys[0];
  ring::mul_add_inplace(m, ct.polys[1], base_prefix(sk.s, ct.level()));
  return Plaintext{std::move(m), ct.scale};
}

Ciphertext add_ct(const Ciphertext& a, const Ciphertext& b) {
  require_same_level(a, b.level(), "add");
  require_same_scale(a.scale, b.scale, "add");
  const Ciphertext& big = a.size() >= b.size() ? a : b;
  const Ciphertext& small = a.size() >= b.size() ? b : a;
  Ciphertext out = big;
  for (std::size_t i = 0; i < small.size(); ++i) ring::add_inplace(out.polys[i], small.polys[i]);
  return out;
}

Ciphertext sub_ct(const Ciphertext& a, const Ciphertext& b) { return add_ct(a, negate(b)); }

Ciphertext negate(const Ciphertext& a) {
  Ciphertext out = a;
  for (auto& p : out.polys) ring::neg_inplace(p);
  return out;
}

Ciphertext add_plain(const Ciphertext& a, const Plaintext& p) {
  require_same_level(a, p.level(), "add_plain");
  require_same_scale(a.scale, p.scale, "add_plain");
  Ciphertext out = a;
  ring::add_inplace(out.polys[0], p.poly);
  return out;
}

Ciphertext sub_plain(const Ciphertext& a, const Plaintext& p) {
  require_same_level(a, p.level(), "sub_plain");
  require_same_scale(a.scale, p.scale, "sub_plain");
  Ciphertext out = a;
  ring::sub_inplace(out.polys[0], p.poly);
  return out;
}

Ciphertext add_const(const Ciphertext& a, double value) {
  Ciphertext out = a;
  RingPoly& c0 = out.polys[0];
  const double c = std::round(value * a.scale);
  if (!(std::abs(c) < 9.2e18)) throw InvalidArgument("add_const: constant too large for scale");
  const auto ci = static_cast<std::int64_t>(c);
  const ring::Kernels& kern = ring::kernels();
  std::vector<u64> row(c0.degree());
  for (std::size_t k = 0; k < c0.prime_count(); ++k) {
    const auto& f = c0.field(k);
    // A constant is the same value at every evaluation point.
    std::fill(row.begin(), row.end(), f.modulus.from_signed(ci));
    kern.add(c0.residue(k).data(), row.data(), c0.residue(k).data(), row.size(), f.value());
  }
  return out;
}

Ciphertext tensor(const Context& ctx, const Ciphertext& a, const Ciphertext& b) {
  require_linear(a, "mult");
  require_linear(b, "mult");
  require_same_level(a, b.level(), "mult");
  const double scale = a.scale * b.scale;
  check_scale_fits(ctx, scale, a.level());
  RingPoly d0 = ring::poly_mul(a.polys[0], b.polys[0]);
  RingPoly d1 = ring::poly_mul(a.polys[0], b.polys[1]);
  ring::mul_add_inplace(d1, a.polys[1], b.polys[0]);
  RingPoly d2 = ring::poly_mul(a.polys[1], b.polys[1]);
  return Ciphertext{{std::move(d0), std::move(d1), std::move(d2)}, scale};
}

Ciphertext relinearize(const Context& ctx, const Ciphertext& ct, const EvaluationKey& evk) {
  if (ct.size() == 2) return ct;
  if (ct.size() != 3) throw InvalidArgument("relinearize expects 3 polynomials");
  if (evk.params_hash != ctx.hash() || evk.key.b.empty()) {
    throw MissingKey("relinearization key missing or for other parameters");
  }
  auto [k0, k1] = key_switch(ctx, ct.polys[2], evk.key);
  Ciphertext out{{ct.polys[0], ct.polys[1]}, ct.scale};
  ring::add_inplace(out.polys[0], k0);
  ring::add_inplace(out.polys[1], k1);
  return out;
}

Ciphertext mult_ct(const Context& ctx, const Ciphertext& a, const Ciphertext& b,
                   const EvaluationKey& evk) {
  return relinearize(ctx, tensor(ctx, a, b), evk);
}

Ciphertext square(const Context& ctx, const Ciphertext& a, const EvaluationKey& evk) {
  require_linear(a, "square");
  const double scale = a.scale * a.scale;
  check_scale_fits(ctx, scale, a.level());
  RingPoly d0 = ring::poly_mul(a.polys[0], a.polys[0]);
  RingPoly d1 = ring::poly_mul(a.polys[0], a.polys[1]);
  ring::add_inplace(d1, RingPoly(d1));
  RingPoly d2 = ring::poly_mul(a.polys[1], a.polys[1]);
  return relinearize(ctx, Ciphertext{{std::move(d0), std::move(d1), std::move(d2)}, scale}, evk);
}

Ciphertext mult_plain(const Context& ctx, const Ciphertext& a, const Plaintext& p) {
  require_same_level(a, p.level(), "mult_plain");
  const double scale = a.scale * p.scale;
  check_scale_fits(ctx, scale, a.level());
  Ciphertext out = a;
  for (auto& c : out.polys) ring::mul_inplace(c, p.poly);
  out.scale = scale;
  return out;
}

Ciphertext mult_const(const Context& ctx, const Ciphertext& a, double value) {
  const double s = ctx.scale_at(a.level());
  const double c = std::round(value * s);
  if (!(std::abs(c) < 9.2e18)) throw InvalidArgument("mult_const: constant too large");
  const double scale = a.scale * s;
  check_scale_fits(ctx, scale, a.level());
  Ciphertext out = mult_int(a, static_cast<std::int64_t>(c));
  out.scale = scale;
  return out;
}

Ciphertext mult_int(const Ciphertext& a, std::int64_t k) {
  Ciphertext out = a;
  for (auto& p : out.polys) {
    std::vector<u64> consts(p.prime_count());
    for (std::size_t i = 0; i < consts.size(); ++i) consts[i] = p.field(i).modulus.from_signed(k);
    ring::mul_rns_scalar_inplace(p, consts);
  }
  return out;
}

Ciphertext rescale(const Context& ctx, const Ciphertext& a) {
  if (a.level() < 2) throw LevelExhausted("rescale: no prime left to drop");
  const double q = static_cast<double>(ctx.last_prime(a.level()));
  Ciphertext out = a;
  for (auto& p : out.polys) ring::drop_last_prime_inplace(p);
  out.scale = a.scale / q;
  return out;
}

Ciphertext drop_levels(const Ciphertext& a, std::size_t level) {
  if (level == 0 || level > a.level()) throw InvalidArgument("drop_levels: bad target level");
  Ciphertext out = a;
  for (auto& p : out.polys) p.truncate_to_level(level);
  return out;
}

Ciphertext adjust_scale(const Context& ctx, const Ciphertext& a, std::size_t level) {
  const double target = ctx.scale_at(level);
  if (level == a.level() && a.scale == target) return a;
  if (level >= a.level()) {
    throw LevelExhausted("adjust_scale: reaching level " + std::to_string(level) + " from " +
                         std::to_string(a.level()) + " needs a spare level");
  }
  // Multiply by an integer constant c ~ target * q_level * ... / scale and
  // rescale m times; pick the smallest m that makes c large enough for the
  // rounding of c to be negligible.
  for (std::size_t m = 1; level + m <= a.level(); ++m) {
    double c = target / a.scale;
    for (std::size_t i = 0; i < m; ++i) c *= static_cast<double>(ctx.last_prime(level + 1 + i));
    if (c >= std::ldexp(1.0, 62)) break;
    // Small constants are only usable when they are integers already (a
    // plain rescale has c == 1).
    const double rc = std::round(c);
    if (c < std::ldexp(1.0, 30) && (rc < 1 || std::abs(rc - c) > std::ldexp(c, -40))) continue;
    Ciphertext out = drop_levels(a, level + m);
    out = mult_int(out, static_cast<std::int64_t>(std::llround(c)));
    out.scale = a.scale * std::round(c);
    for (std::size_t i = 0; i < m; ++i) out = rescale(ctx, out);
    // The residual factor round(c)/c is within 2^-31 of one; record the
    // canonical scale so the result combines with other level-l values.
    out.scale = target;
    return out;
  }
  throw LevelExhausted("adjust_scale: not enough levels to reach the canonical scale");
}

namespace {

/// Drops `a` to level + 1 for a single rescale onto `level`.
Ciphertext prepare_landing(const Ciphertext& a, std::size_t level, const char* what) {
  if (level == 0 || level >= a.level()) {
    throw LevelExhausted(std::string(what) + ": target level " + std::to_string(level) +
                         " must be below the operand level " + std::to_string(a.level()));
  }
  require_linear(a, what);
  return a.level() == level + 1 ? a : drop_levels(a, level + 1);
}

}  // namespace

Ciphertext mult_const_to(const Context& ctx, const Ciphertext& a, double value, std::size_t level) {
  Ciphertext out = prepare_landing(a, level, "mult_const_to");
  const double q = static_cast<double>(ctx.last_prime(level + 1));
  const double k = std::round(value * ctx.scale_at(level) * q / a.scale);
  if (!(std::abs(k) < 0x1p62)) throw InvalidArgument("mult_const_to: constant too large for the scale");
  // a.scale * k / q equals S(level) up to the rounding of k.
  out = rescale(ctx, mult_int(out, static_cast<std::int64_t>(k)));
  out.scale = ctx.scale_at(level);
  return out;
}

Ciphertext mult_plain_to(const Context& ctx, const Ciphertext& a, std::span<const double> values,
                         std::size_t level) {
  Ciphertext out = prepare_landing(a, level, "mult_plain_to");
  const double q = static_cast<double>(ctx.last_prime(level + 1));
  const double pt_scale = ctx.scale_at(level) * q / a.scale;
  out = mult_plain(ctx, out, encode(ctx, values, pt_scale, level + 1));
  out = rescale(ctx, out);
  out.scale = ctx.scale_at(level);
  return out;
}

Ciphertext bring_to(const Context& ctx, const Ciphertext& a, std::size_t level) {
  if (level == a.level() && a.scale == ctx.scale_at(level)) return a;
  return mult_const_to(ctx, a, 1.0, level);
}

std::vector<long> rotation_plan(long step, std::size_t slots, const RotationKeySet* keys) {
  const long k = normalize_step(step, slots);
  if (k == 0) return {};
  if (keys && keys->has(k)) return {k};
  std::vector<long> out;
  for (long t : naf_terms(k)) out.push_back(normalize_step(t, slots));
  return out;
}

Ciphertext rotate(const Context& ctx, const Ciphertext& a, long step, const RotationKeySet& keys) {
  require_linear(a, "rotate");
  if (keys.params_hash != ctx.hash()) throw ParamsMismatch("rotation keys belong to other parameters");
  const auto plan = rotation_plan(step, ctx.slot_count(), &keys);
  for (long s : plan) {
    if (!keys.has(s)) throw MissingKey("no rotation key for step " + std::to_string(s));
  }
  Ciphertext out = a;
  for (long s : plan) out = rotate_single(ctx, out, s, keys.keys.at(s));
  return out;
}

std::pair<RingPoly, RingPoly> key_switch(const Context& ctx, const RingPoly& d,
                                         const SwitchingKey& key) {
  const std::size_t l = d.level();
  const std::size_t L = ctx.max_level();
  const std::size_t n = ctx.degree();
  const std::size_t alpha = ctx.digit_size();
  const std::size_t K = alpha;
  if (key.b.size() != ctx.digit_count(L)) throw MissingKey("switching key has wrong digit count");
  const ring::Kernels& kern = ring::kernels();

  const RingPoly d_ntt = ring::to_domain(d, Domain::kNtt);
  const RingPoly d_coef = ring::to_domain(d, Domain::kCoefficient);
  RingPoly acc0(d.basis_ptr(), l, Domain::kNtt, true);
  RingPoly acc1(d.basis_ptr(), l, Domain::kNtt, true);
  RingPoly digit(d.basis_ptr(), l, Domain::kNtt, true);
  std::vector<u64> conv;

  for (std::size_t j = 0; j < ctx.digit_count(l); ++j) {
    const std::size_t lo = j * alpha, hi = std::min(l, lo + alpha);
    const std::size_t width = hi - lo;
    conv.assign((l - width + K) * n, 0);
    ctx.mod_up(l, j).convert(d_coef.data().subspan(lo * n, width * n), conv, n);
    std::size_t next = 0;
    for (std::size_t r = 0; r < l + K; ++r) {
      u64* dst = digit.residue(r).data();
      if (r >= lo && r < hi) {
        std::copy_n(d_ntt.residue(r).begin(), n, dst);
      } else {
        std::copy_n(conv.begin() + (next++) * n, n, dst);
        kern.ntt_forward(dst, digit.field(r).ntt);
      }
      const std::size_t key_row = r < l ? r : L + (r - l);
      const auto& m = digit.field(r).modulus;
      kern.mul_add(dst, key.b[j].residue(key_row).data(), acc0.residue(r).data(), n, m);
      kern.mul_add(dst, key.a[j].residue(key_row).data(), acc1.residue(r).data(), n, m);
    }
  }
  return {mod_down(ctx, acc0), mod_down(ctx, acc1)};
}

}  // namespace hefine::ckks
