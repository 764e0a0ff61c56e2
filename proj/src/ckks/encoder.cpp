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

#include "hefine/ckks/encoder.hpp"

#include <cmath>
#include <string>

#include "hefine/common/error.hpp"
#include "hefine/ring/kernels.hpp"

namespace hefine::ckks {

using ring::Domain;
using ring::Modulus;
using ring::RingPoly;
using ring::u128;

namespace {

void bit_reverse_permute(std::span<std::complex<double>> v) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
}

/// x mod q for an integral double of any magnitude. Splitting x into a
/// 53-bit mantissa and a power of two keeps the reduction exact.
u64 reduce_integral(double x, const Modulus& q) {
  const bool negative = x < 0;
  int exp = 0;
  const double frac = std::frexp(std::abs(x), &exp);
  u64 r;
  if (exp <= 63) {
    r = q.reduce(static_cast<u64>(std::abs(x)));
  } else {
    const u64 mantissa = static_cast<u64>(std::ldexp(frac, 53));
    r = q.mul(q.reduce(mantissa), q.pow(2, static_cast<u64>(exp - 53)));
  }
  return negative ? q.neg(r) : r;
}

Plaintext from_coefficients(const Context& ctx, std::span<const double> coeffs, double scale,
                            std::size_t level) {
  if (!(scale > 0) || !std::isfinite(scale)) throw InvalidArgument("encode: scale must be positive");
  if (level == 0 || level > ctx.max_level()) throw InvalidArgument("encode: level out of range");
  RingPoly poly(ctx.basis(), level, Domain::kCoefficient);
  double max_abs = 0;
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InvalidArgument("encode: non-finite value");
    max_abs = std::max(max_abs, std::abs(c));
  }
  // The scale and the rounded coefficients must stay below half the
  // modulus of the level.
  double log_q = 0;
  for (std::size_t i = 0; i < level; ++i) log_q += std::log2(static_cast<double>(ctx.last_prime(i + 1)));
  if (std::log2(scale) >= log_q - 1 || (max_abs > 0 && std::log2(max_abs) >= log_q - 1)) {
    throw InvalidArgument("encode: scale too large for level " + std::to_string(level));
  }
  for (std::size_t k = 0; k < level; ++k) {
    const Modulus& q = poly.field(k).modulus;
    auto row = poly.residue(k);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double c = std::round(coeffs[i]);
      row[i] = std::abs(c) < 9.2e18 ? q.from_signed(static_cast<std::int64_t>(c))
                                    : reduce_integral(c, q);
    }
  }
  ring::ntt_forward_inplace(poly);
  return Plaintext{std::move(poly), scale};
}

}  // namespace

void special_fft(const Context& ctx, std::span<std::complex<double>> vals) {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * ctx.degree();
  const auto rot = ctx.rotation_group();
  const auto roots = ctx.root_powers();
  bit_reverse_permute(vals);
  for (std::size_t len = 2; len <= size; len <<= 1) {
    const std::size_t lenh = len >> 1, lenq = len << 2;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < lenh; ++j) {
        const std::size_t idx = (rot[j] % lenq) * (m / lenq);
        const auto u = vals[i + j];
        const auto v = vals[i + j + lenh] * roots[idx];
        vals[i + j] = u + v;
        vals[i + j + lenh] = u - v;
      }
    }
  }
}

void special_ifft(const Context& ctx, std::span<std::complex<double>> vals) {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * ctx.degree();
  const auto rot = ctx.rotation_group();
  const auto roots = ctx.root_powers();
  for (std::size_t len = size; len >= 2; len >>= 1) {
    const std::size_t lenh = len >> 1, lenq = len << 2;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < lenh; ++j) {
        const std::size_t idx = (lenq - (rot[j] % lenq)) * (m / lenq);
        const auto u = vals[i + j] + vals[i + j + lenh];
        const auto v = (vals[i + j] - vals[i + j + lenh]) * roots[idx];
        vals[i + j] = u;
        vals[i + j + lenh] = v;
      }
    }
  }
  bit_reverse_permute(vals);
  const double inv = 1.0 / static_cast<double>(size);
  for (auto& v : vals) v *= inv;
}

Plaintext encode(const Context& ctx, std::span<const double> values, double scale,
                 std::size_t level) {
  const std::size_t slots = ctx.slot_count();
  if (values.size() > slots) {
    throw InvalidArgument("encode: " + std::to_string(values.size()) + " values exceed " +
                          std::to_string(slots) + " slots");
  }
  std::vector<std::complex<double>> vals(slots);
  for (std::size_t i = 0; i < values.size(); ++i) vals[i] = values[i];
  special_ifft(ctx, vals);
  std::vector<double> coeffs(ctx.degree());
  for (std::size_t i = 0; i < slots; ++i) {
    coeffs[i] = vals[i].real() * scale;
    coeffs[i + slots] = vals[i].imag() * scale;
  }
  return from_coefficients(ctx, coeffs, scale, level);
}

Plaintext encode_constant(const Context& ctx, double value, double scale, std::size_t level) {
  const double c = value * scale;
  return from_coefficients(ctx, std::span<const double>(&c, 1), scale, level);
}

std::vector<double> decode(const Context& ctx, const Plaintext& pt) {
  RingPoly p = pt.poly.domain() == Domain::kNtt ? ring::ntt_inverse(pt.poly) : pt.poly;
  const std::size_t n = ctx.degree(), slots = ctx.slot_count();
  std::vector<double> coeffs(n);
  const Modulus& q0 = p.field(0).modulus;
  if (p.level() == 1) {
    const u64 half = q0.value() / 2;
    for (std::size_t i = 0; i < n; ++i) {
      const u64 r = p.residue(0)[i];
      coeffs[i] = r > half ? -static_cast<double>(q0.value() - r) : static_cast<double>(r);
    }
  } else {
    // Two-prime CRT: exact as long as |coefficient| < q0*q1/2, which holds
    // for every value this library decrypts (scale^2 times slot magnitude).
    const Modulus& q1 = p.field(1).modulus;
    const u64 q0_inv = q1.inverse(q1.reduce(q0.value()));
    const u128 big = static_cast<u128>(q0.value()) * q1.value();
    for (std::size_t i = 0; i < n; ++i) {
      const u64 r0 = p.residue(0)[i];
      const u64 r1 = p.residue(1)[i];
      const u64 t = q1.mul(q1.sub(r1, q1.reduce(r0)), q0_inv);
      const u128 x = static_cast<u128>(t) * q0.value() + r0;
      coeffs[i] = x > big / 2 ? -static_cast<double>(big - x) : static_cast<double>(x);
    }
  }
  std::vector<std::complex<double>> vals(slots);
  const double inv_scale = 1.0 / pt.scale;
  for (std::size_t i = 0; i < slots; ++i) {
    vals[i] = {coeffs[i] * inv_scale, coeffs[i + slots] * inv_scale};
  }
  special_fft(ctx, vals);
  std::vector<double> out(slots);
  for (std::size_t i = 0; i < slots; ++i) out[i] = vals[i].real();
  return out;
}

}  // namespace hefine::ckks
