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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "hefine/common/error.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/ring/modulus.hpp"
#include "hefine/ring/ring_poly.hpp"
#include "hefine/ring/rns.hpp"
#include "hefine/ring/sampling.hpp"
#include "support/oracles.hpp"

namespace hefine::ring {
namespace {

using oracle::u128;

const std::vector<u64> kPrimes40 = {1099511623297ULL, 1099511622529ULL, 1099511621249ULL};
const std::vector<u64> kPrimes30 = {1073741441ULL, 1073739649ULL, 1073738753ULL};

BasisPtr make_basis(std::size_t n, const std::vector<u64>& primes,
                    const std::vector<u64>& special = {}) {
  return std::make_shared<const RnsBasis>(n, primes, special);
}

std::vector<u64> random_residues(std::size_t n, u64 q, std::mt19937_64& rng) {
  std::uniform_int_distribution<u64> d(0, q - 1);
  std::vector<u64> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

RingPoly random_poly(const BasisPtr& b, std::size_t level, std::mt19937_64& rng,
                     Domain domain = Domain::kCoefficient) {
  RingPoly p(b, level, domain);
  for (std::size_t k = 0; k < level; ++k) {
    const auto r = random_residues(b->degree(), p.field(k).value(), rng);
    std::copy(r.begin(), r.end(), p.residue(k).begin());
  }
  return p;
}

std::vector<u64> row(const RingPoly& p, std::size_t k) {
  return {p.residue(k).begin(), p.residue(k).end()};
}

// ---------------------------------------------------------------------------
// Modulus

TEST(Modulus, MatchesWideOracle) {
  std::mt19937_64 rng(1);
  for (u64 q : {65537ULL, 1099511623297ULL, 1152921504606844417ULL, (1ULL << 61) - 1}) {
    Modulus m(q);
    std::uniform_int_distribution<u64> d(0, q - 1);
    for (int i = 0; i < 2000; ++i) {
      const u64 a = i < 4 ? q - 1 - i : d(rng);
      const u64 b = i < 4 ? q - 1 : d(rng);
      ASSERT_EQ(m.mul(a, b), oracle::mulmod(a, b, q));
      ASSERT_EQ(m.add(a, b), static_cast<u64>((u128)a + b) % q);
      ASSERT_EQ(m.sub(a, b), (a + q - b) % q);
      const u128 wide = (u128)rng() << 64 | rng();
      ASSERT_EQ(m.reduce128(wide), static_cast<u64>(wide % q));
      const u64 w = d(rng);
      const u64 x = rng();
      ASSERT_EQ(mul_shoup(x, w, m.shoup(w), q), oracle::mulmod(x % q, w, q));
    }
  }
}

TEST(Modulus, InverseAndPow) {
  Modulus m(1099511623297ULL);
  for (u64 a : {1ULL, 2ULL, 12345678901ULL, 1099511623296ULL}) {
    EXPECT_EQ(m.mul(a, m.inverse(a)), 1u);
  }
  EXPECT_EQ(m.pow(3, 0), 1u);
  EXPECT_EQ(m.pow(3, 5), 243u);
  EXPECT_THROW(m.inverse(0), InvalidArgument);
  EXPECT_THROW(Modulus((1ULL << 62) + 1), InvalidArgument);
}

TEST(Modulus, PrimalityMatchesTrialDivision) {
  for (u64 n = 0; n < 5000; ++n) ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
  EXPECT_TRUE(is_prime(1152921504606844417ULL));
  EXPECT_FALSE(is_prime(1152921504606844419ULL));
}

// ---------------------------------------------------------------------------
// PrimeField / RnsBasis

TEST(PrimeField, RootInvariants) {
  for (std::size_t n : {8u, 64u, 8192u}) {
    for (u64 q : {1152921504606844417ULL, 65537ULL}) {
      if ((q - 1) % (2 * n) != 0) continue;
      PrimeField f(q, n);
      EXPECT_EQ(oracle::powmod(f.ntt.psi, 2 * n, q), 1u);
      EXPECT_EQ(oracle::powmod(f.ntt.psi, n, q), q - 1);
      EXPECT_EQ(oracle::mulmod(f.ntt.n_inverse, n, q), 1u);
    }
  }
}

TEST(PrimeField, RejectsBadModuli) {
  EXPECT_THROW(PrimeField(65535, 8), InvalidArgument);          // composite
  EXPECT_THROW(PrimeField(131041, 64), InvalidArgument);        // not 1 mod 128
  EXPECT_NO_THROW(PrimeField(131041, 8));
}

TEST(RnsBasis, RejectsDuplicatesAndBadDegree) {
  const std::vector<u64> dup = {65537, 65537};
  EXPECT_THROW(RnsBasis(8, dup), InvalidArgument);
  const std::vector<u64> one = {65537};
  EXPECT_THROW(RnsBasis(12, one), InvalidArgument);
  EXPECT_THROW(RnsBasis(8, {}), InvalidArgument);
}

TEST(RnsBasis, NearestNttPrime) {
  const std::vector<u64> none;
  const u64 p = nearest_ntt_prime(std::ldexp(1.0, 40), 8192, none);
  EXPECT_TRUE(is_prime(p));
  EXPECT_EQ((p - 1) % 16384, 0u);
  EXPECT_LT(std::abs(std::log2(static_cast<double>(p)) - 40.0), 1e-3);
  const std::vector<u64> ex = {p};
  const u64 p2 = nearest_ntt_prime(std::ldexp(1.0, 40), 8192, ex);
  EXPECT_NE(p2, p);
  EXPECT_TRUE(is_prime(p2));
}

// ---------------------------------------------------------------------------
// NTT

TEST(Ntt, ZeroAndConstant) {
  auto b = make_basis(8, kPrimes40);
  RingPoly z(b, 3, Domain::kCoefficient);
  EXPECT_TRUE(ntt_forward(z).is_zero());
  const std::vector<std::int64_t> c = {42};
  RingPoly k = RingPoly::from_signed(b, 3, c);
  RingPoly kf = ntt_forward(k);
  for (std::size_t r = 0; r < 3; ++r) {
    for (u64 v : kf.residue(r)) EXPECT_EQ(v, 42u);
  }
  EXPECT_EQ(ntt_inverse(kf), k);
}

TEST(Ntt, BruteForceEvaluationN8) {
  // One 17-bit prime congruent to 1 mod 16.
  auto b = make_basis(8, {131041});
  std::mt19937_64 rng(7);
  const u64 psi = b->base(0).ntt.psi;
  for (int t = 0; t < 50; ++t) {
    RingPoly p = random_poly(b, 1, rng);
    const auto expect = oracle::eval_odd_powers(row(p, 0), psi, 131041);
    EXPECT_EQ(row(ntt_forward(p), 0), expect);
  }
}

TEST(Ntt, InverseVandermondeOracleN8) {
  auto b = make_basis(8, {131041});
  std::mt19937_64 rng(8);
  const u64 psi = b->base(0).ntt.psi;
  for (int t = 0; t < 50; ++t) {
    RingPoly v = random_poly(b, 1, rng, Domain::kNtt);
    const auto expect = oracle::interpolate_odd_powers(row(v, 0), psi, 131041);
    EXPECT_EQ(row(ntt_inverse(v), 0), expect);
  }
}

TEST(Ntt, RoundTripAllLevels) {
  std::vector<u64> primes;
  for (int i = 0; i < 4; ++i) primes.push_back(nearest_ntt_prime(std::ldexp(1.0, 50 + i), 8192, primes));
  auto b = make_basis(8192, primes);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const std::size_t level = 1 + t % 4;
    RingPoly p = random_poly(b, level, rng);
    ASSERT_EQ(ntt_inverse(ntt_forward(p)), p);
  }
}

TEST(Ntt, WrongDomainRejected) {
  auto b = make_basis(8, kPrimes40);
  RingPoly p(b, 2, Domain::kNtt);
  EXPECT_THROW(ntt_forward(p), DomainMismatch);
  RingPoly c(b, 2, Domain::kCoefficient);
  EXPECT_THROW(ntt_inverse(c), DomainMismatch);
}

// ---------------------------------------------------------------------------
// Addition and multiplication

TEST(PolyAdd, IdentityInverseAndCrtOracle) {
  auto b = make_basis(8, kPrimes40);
  std::mt19937_64 rng(10);
  const u128 Q = oracle::product(kPrimes40);
  for (int t = 0; t < 100; ++t) {
    RingPoly a = random_poly(b, 3, rng);
    RingPoly c = random_poly(b, 3, rng);
    EXPECT_EQ(poly_add(a, RingPoly(b, 3, Domain::kCoefficient)), a);
    EXPECT_TRUE(poly_add(a, poly_neg(a)).is_zero());
    RingPoly s = poly_add(a, c);
    for (std::size_t i = 0; i < 8; ++i) {
      std::vector<u64> ra, rc, rs;
      for (std::size_t k = 0; k < 3; ++k) {
        ra.push_back(a.residue(k)[i]);
        rc.push_back(c.residue(k)[i]);
        rs.push_back(s.residue(k)[i]);
      }
      const u128 want = (oracle::crt(ra, kPrimes40) + oracle::crt(rc, kPrimes40)) % Q;
      ASSERT_TRUE(oracle::crt(rs, kPrimes40) == want);
    }
  }
}

TEST(PolyAdd, MismatchesRejected) {
  auto b = make_basis(8, kPrimes40);
  auto b2 = make_basis(8, kPrimes40);
  RingPoly a(b, 3, Domain::kCoefficient);
  EXPECT_THROW(poly_add(a, RingPoly(b, 2, Domain::kCoefficient)), DomainMismatch);
  EXPECT_THROW(poly_add(a, RingPoly(b, 3, Domain::kNtt)), DomainMismatch);
  EXPECT_THROW(poly_add(a, RingPoly(b2, 3, Domain::kCoefficient)), DomainMismatch);
  EXPECT_THROW(poly_mul(a, RingPoly(b, 2, Domain::kCoefficient)), DomainMismatch);
}

TEST(PolyMul, IdentityAndWraparound) {
  auto b = make_basis(16, kPrimes40);
  std::mt19937_64 rng(11);
  RingPoly a = random_poly(b, 3, rng);
  const std::vector<std::int64_t> one = {1};
  EXPECT_EQ(poly_mul(a, RingPoly::from_signed(b, 3, one)), a);

  std::vector<std::int64_t> xn1(16, 0), x(16, 0), minus_one = {-1};
  xn1[15] = 1;
  x[1] = 1;
  EXPECT_EQ(poly_mul(RingPoly::from_signed(b, 3, xn1), RingPoly::from_signed(b, 3, x)),
            RingPoly::from_signed(b, 3, minus_one));
}

TEST(PolyMul, SchoolbookOracleN16) {
  auto b = make_basis(16, kPrimes40);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    RingPoly a = random_poly(b, 3, rng);
    RingPoly c = random_poly(b, 3, rng);
    RingPoly p = poly_mul(a, c);
    EXPECT_EQ(p.domain(), Domain::kCoefficient);
    for (std::size_t k = 0; k < 3; ++k) {
      ASSERT_EQ(row(p, k), oracle::negacyclic_mul(row(a, k), row(c, k), kPrimes40[k]));
    }
  }
}

TEST(PolyMul, CrtSignedIntegerOracle) {
  // Small signed coefficients: the exact integer product fits comfortably in
  // 128 bits, so CRT reconstruction of the RNS result must equal it.
  auto b = make_basis(64, kPrimes40);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::int64_t> d(-(1 << 20), 1 << 20);
  const u128 Q = oracle::product(kPrimes40);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::int64_t> a(64), c(64);
    for (auto& v : a) v = d(rng);
    for (auto& v : c) v = d(rng);
    std::vector<__int128> exact(64, 0);
    for (int i = 0; i < 64; ++i) {
      for (int j = 0; j < 64; ++j) {
        const __int128 term = static_cast<__int128>(a[i]) * c[j];
        if (i + j < 64) {
          exact[i + j] += term;
        } else {
          exact[i + j - 64] -= term;
        }
      }
    }
    RingPoly p = poly_mul(RingPoly::from_signed(b, 3, a), RingPoly::from_signed(b, 3, c));
    for (std::size_t i = 0; i < 64; ++i) {
      std::vector<u64> r;
      for (std::size_t k = 0; k < 3; ++k) r.push_back(p.residue(k)[i]);
      const u128 got = oracle::crt(r, kPrimes40);
      const __int128 centered = got > Q / 2 ? -static_cast<__int128>(Q - got) : static_cast<__int128>(got);
      ASSERT_TRUE(centered == exact[i]) << "coefficient " << i;
    }
  }
}

TEST(PolyMul, RingLaws) {
  auto b = make_basis(8, kPrimes30);
  std::mt19937_64 rng(14);
  for (int t = 0; t < 50; ++t) {
    RingPoly x = random_poly(b, 3, rng), y = random_poly(b, 3, rng), z = random_poly(b, 3, rng);
    EXPECT_EQ(poly_mul(x, y), poly_mul(y, x));
    EXPECT_EQ(poly_mul(x, poly_add(y, z)), poly_add(poly_mul(x, y), poly_mul(x, z)));
    EXPECT_EQ(poly_mul(poly_mul(x, y), z), poly_mul(x, poly_mul(y, z)));
  }
}

TEST(PolyMul, MixedDomainsFollowLeftOperand) {
  auto b = make_basis(16, kPrimes30);
  std::mt19937_64 rng(15);
  RingPoly x = random_poly(b, 3, rng), y = random_poly(b, 3, rng);
  RingPoly want = poly_mul(x, y);
  EXPECT_EQ(poly_mul(ntt_forward(x), y), ntt_forward(want));
  EXPECT_EQ(poly_mul(x, ntt_forward(y)), want);
}

// ---------------------------------------------------------------------------
// Automorphisms

TEST(Automorphism, IdentityAndInverse) {
  auto b = make_basis(16, kPrimes30);
  std::mt19937_64 rng(16);
  RingPoly p = random_poly(b, 3, rng);
  EXPECT_EQ(automorphism(p, 1), p);
  for (u64 k = 1; k < 32; k += 2) {
    u64 k_inv = 1;
    while ((k_inv * k) % 32 != 1) k_inv += 2;
    EXPECT_EQ(automorphism(automorphism(p, k), k_inv), p) << k;
  }
}

TEST(Automorphism, SubstitutionOracleN8) {
  auto b = make_basis(8, {131041});
  std::mt19937_64 rng(17);
  const u64 q = 131041;
  for (int t = 0; t < 20; ++t) {
    RingPoly p = random_poly(b, 1, rng);
    const auto c = row(p, 0);
    std::vector<u64> want(8, 0);
    for (std::size_t i = 0; i < 8; ++i) {
      const std::size_t e = (i * 5) % 16;
      if (e < 8) {
        want[e] = c[i];
      } else {
        want[e - 8] = (q - c[i]) % q;
      }
    }
    EXPECT_EQ(row(automorphism(p, 5), 0), want);
  }
}

TEST(Automorphism, CompositionAndDomainAgreement) {
  auto b = make_basis(64, kPrimes30);
  std::mt19937_64 rng(18);
  RingPoly p = random_poly(b, 3, rng);
  for (u64 k1 : {3ULL, 5ULL, 25ULL, 127ULL}) {
    for (u64 k2 : {5ULL, 77ULL}) {
      EXPECT_EQ(automorphism(automorphism(p, k1), k2), automorphism(p, (k1 * k2) % 128));
    }
    EXPECT_EQ(automorphism(ntt_forward(p), k1), ntt_forward(automorphism(p, k1)));
  }
  EXPECT_THROW(automorphism(p, 4), InvalidArgument);
  EXPECT_THROW(automorphism(p, 129), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Rescaling by the last prime

TEST(DropLastPrime, ZeroAndExactMultiple) {
  auto b = make_basis(8, kPrimes40);
  RingPoly z(b, 3, Domain::kCoefficient);
  RingPoly dz = drop_last_prime(z);
  EXPECT_EQ(dz.level(), 2u);
  EXPECT_TRUE(dz.is_zero());

  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::int64_t> d(-1000000, 1000000);
  std::vector<std::int64_t> y(8);
  for (auto& v : y) v = d(rng);
  RingPoly py = RingPoly::from_signed(b, 3, y);
  RingPoly scaled = poly_mul_scalar(py, static_cast<std::int64_t>(kPrimes40[2]));
  EXPECT_EQ(drop_last_prime(scaled), RingPoly::from_signed(b, 2, y));
}

TEST(DropLastPrime, RoundDivideCrtOracle) {
  auto b = make_basis(8, kPrimes40);
  std::mt19937_64 rng(20);
  const std::vector<u64> low(kPrimes40.begin(), kPrimes40.begin() + 2);
  const u128 Qlow = oracle::product(low);
  for (int t = 0; t < 200; ++t) {
    RingPoly p = random_poly(b, 3, rng);
    RingPoly r = drop_last_prime(p);
    RingPoly rn = ntt_inverse(drop_last_prime(ntt_forward(p)));
    EXPECT_EQ(r, rn);
    for (std::size_t i = 0; i < 8; ++i) {
      std::vector<u64> in, out;
      for (std::size_t k = 0; k < 3; ++k) in.push_back(p.residue(k)[i]);
      for (std::size_t k = 0; k < 2; ++k) out.push_back(r.residue(k)[i]);
      const u128 x = oracle::crt(in, kPrimes40);
      const u128 want = oracle::round_div(x, kPrimes40[2]) % Qlow;
      ASSERT_TRUE(oracle::crt(out, low) == want) << "coefficient " << i;
    }
  }
}

TEST(DropLastPrime, RejectsLevelOne) {
  auto b = make_basis(8, kPrimes40);
  EXPECT_THROW(drop_last_prime(RingPoly(b, 1, Domain::kCoefficient)), LevelExhausted);
}

// ---------------------------------------------------------------------------
// Basis conversion

TEST(BasisConverter, ResultIsSmallMultipleOffset) {
  const std::vector<Modulus> from = {Modulus(kPrimes30[0]), Modulus(kPrimes30[1])};
  const std::vector<Modulus> to = {Modulus(kPrimes40[0]), Modulus(kPrimes40[1])};
  BasisConverter conv(from, to);
  std::mt19937_64 rng(21);
  const std::size_t n = 16;
  std::vector<u64> in(2 * n), out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i] = rng() % kPrimes30[0];
    in[n + i] = rng() % kPrimes30[1];
  }
  conv.convert(in, out, n);
  const std::vector<u64> fp = {kPrimes30[0], kPrimes30[1]};
  const std::vector<u64> tp = {kPrimes40[0], kPrimes40[1]};
  const u128 A = oracle::product(fp);
  for (std::size_t i = 0; i < n; ++i) {
    const u128 x = oracle::crt({in[i], in[n + i]}, fp);
    const u128 y = oracle::crt({out[i], out[n + i]}, tp);
    ASSERT_TRUE(y >= x);
    ASSERT_TRUE((y - x) % A == 0);
    ASSERT_TRUE((y - x) / A < 2);
  }
}

TEST(BasisConverter, CenteredConversionIsExact) {
  const std::vector<u64> fp = {kPrimes30[0], kPrimes30[1]};
  const std::vector<u64> tp = {kPrimes40[0], kPrimes40[1]};
  BasisConverter conv({Modulus(fp[0]), Modulus(fp[1])}, {Modulus(tp[0]), Modulus(tp[1])});
  const u128 A = oracle::product(fp);
  const u128 T = oracle::product(tp);
  std::mt19937_64 rng(22);
  const std::size_t n = 64;
  std::vector<u128> xs = {0, 1, A / 2, A / 2 + 1, A - 1};
  while (xs.size() < n) xs.push_back(((u128)rng() << 64 | rng()) % A);
  std::vector<u64> in(2 * n), out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i] = static_cast<u64>(xs[i] % fp[0]);
    in[n + i] = static_cast<u64>(xs[i] % fp[1]);
  }
  conv.convert_centered(in, out, n);
  for (std::size_t i = 0; i < n; ++i) {
    // Centred representative lifted mod T; within one unit of A/2 either
    // side is acceptable.
    const u128 got = oracle::crt({out[i], out[n + i]}, tp);
    const u128 low = xs[i], high = T - (A - xs[i]);
    if (xs[i] + 1 >= A / 2 && xs[i] <= A / 2 + 1) {
      ASSERT_TRUE(got == low || got == high) << "index " << i;
    } else {
      ASSERT_TRUE(got == (xs[i] <= A / 2 ? low : high)) << "index " << i;
    }
  }
}

// ---------------------------------------------------------------------------
// Sampling

TEST(Sampling, TernaryWeightAndDeterminism) {
  auto b = make_basis(64, kPrimes40);
  Prng r1(5, "t"), r2(5, "t");
  EXPECT_TRUE(sample_ternary(b, 3, 0, r1).is_zero());
  Prng a(5, "s"), c(5, "s");
  const auto ta = ternary_coeffs(1024, 300, a);
  EXPECT_EQ(ta, ternary_coeffs(1024, 300, c));
  int nz = 0;
  for (auto v : ta) {
    EXPECT_TRUE(v >= -1 && v <= 1);
    nz += v != 0;
  }
  EXPECT_EQ(nz, 300);
  EXPECT_THROW(ternary_coeffs(8, 9, a), InvalidArgument);
  EXPECT_EQ(sample_ternary(b, 3, 32, r1), sample_ternary(b, 3, 32, r2));
}

TEST(Sampling, GaussianMomentsAndTail) {
  Prng rng(6, "gauss");
  const auto g = gaussian_coeffs(100000, kDefaultSigma, rng);
  double sum = 0, sq = 0;
  for (auto v : g) {
    ASSERT_LE(std::abs(v), static_cast<std::int64_t>(6 * kDefaultSigma));
    sum += v;
    sq += static_cast<double>(v) * v;
  }
  const double mean = sum / g.size();
  const double sd = std::sqrt(sq / g.size() - mean * mean);
  EXPECT_LT(std::abs(mean), 0.05);
  // Rounding adds variance 1/12.
  EXPECT_NEAR(sd, kDefaultSigma, 0.05 * kDefaultSigma);
}

TEST(Sampling, UniformInRangeAndConsistentAcrossPrimes) {
  auto b = make_basis(64, kPrimes30);
  Prng rng(7, "u");
  RingPoly u = sample_uniform(b, 3, rng);
  for (std::size_t k = 0; k < 3; ++k) {
    for (u64 v : u.residue(k)) EXPECT_LT(v, kPrimes30[k]);
  }
  Prng g(8, "g");
  RingPoly e = sample_gaussian(b, 3, 3.2, g);
  // Same small integer in every residue.
  for (std::size_t i = 0; i < 64; ++i) {
    const u64 v0 = e.residue(0)[i], v1 = e.residue(1)[i];
    const std::int64_t s0 = v0 > kPrimes30[0] / 2 ? -static_cast<std::int64_t>(kPrimes30[0] - v0) : v0;
    const std::int64_t s1 = v1 > kPrimes30[1] / 2 ? -static_cast<std::int64_t>(kPrimes30[1] - v1) : v1;
    EXPECT_EQ(s0, s1);
  }
}

}  // namespace
}  // namespace hefine::ring
