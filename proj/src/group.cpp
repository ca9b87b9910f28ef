/*
 * Copyright 2026 The QFE Authors.
 *
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

#include "qfe/group.hpp"

#include <algorithm>
#include <cstring>

#include "qfe/errors.hpp"

namespace qfe {
namespace {

constexpr char kOrderHex[] =
    "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";

// Exponents with |s| below this use double-and-add instead of the windowed
// multiplication, which spends more on its table than on a few-bit scalar.
constexpr std::uint64_t kSmallExponent = std::uint64_t{1} << 32;

BigInt limbs_to_bigint(const std::uint64_t limbs[4]) {
  BigInt out;
  mpz_import(out.get_mpz_t(), 4, -1, sizeof(std::uint64_t), 0, 0, limbs);
  return out;
}

blst_scalar to_blst_scalar(const Scalar& s) {
  blst_scalar out;
  blst_scalar_from_fr(&out, &s.raw());
  return out;
}

template <typename Point, typename Add, typename Dbl>
Point small_multiple(const Point& base, std::uint64_t k, Add add, Dbl dbl) {
  Point acc;
  std::memset(&acc, 0, sizeof(acc));
  if (k == 0) return acc;
  const int top = 63 - __builtin_clzll(k);
  acc = base;
  for (int bit = top - 1; bit >= 0; --bit) {
    dbl(&acc, &acc);
    if ((k >> bit) & 1U) add(&acc, &acc, &base);
  }
  return acc;
}

GT gt_pow_unsigned(const GT& base, std::span<const std::uint8_t> le_bytes,
                   std::size_t nbits) {
  GT acc;
  bool started = false;
  for (std::size_t bit = nbits; bit-- > 0;) {
    if (started) blst_fp12_cyclotomic_sqr(&acc.raw(), &acc.raw());
    if ((le_bytes[bit / 8] >> (bit % 8)) & 1U) {
      if (started) {
        acc *= base;
      } else {
        acc = base;
        started = true;
      }
    }
  }
  return acc;
}

GT gt_pow_small(const GT& base, std::int64_t s) {
  const std::uint64_t mag = s < 0 ? std::uint64_t(0) - std::uint64_t(s) : std::uint64_t(s);
  std::array<std::uint8_t, 8> le{};
  for (int i = 0; i < 8; ++i) le[i] = std::uint8_t(mag >> (8 * i));
  GT r = gt_pow_unsigned(base, le, 64);
  return s < 0 ? r.inverse() : r;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kOutOfBound: return "out_of_bound";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kBadEncoding: return "bad_encoding";
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kCurveMismatch: return "curve_mismatch";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kInvalidFormat: return "invalid_format";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

const BigInt& group_order() {
  static const BigInt p(kOrderHex, 16);
  return p;
}

// ---- Scalar ---------------------------------------------------------------

Scalar::Scalar() { std::memset(&v_, 0, sizeof(v_)); }

Scalar Scalar::from_int(std::int64_t v) {
  const std::uint64_t mag = v < 0 ? std::uint64_t(0) - std::uint64_t(v) : std::uint64_t(v);
  const std::uint64_t limbs[4] = {mag, 0, 0, 0};
  Scalar out;
  blst_fr_from_uint64(&out.v_, limbs);
  if (v < 0) blst_fr_cneg(&out.v_, &out.v_, true);
  return out;
}

Scalar Scalar::from_bigint(const BigInt& v) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), group_order().get_mpz_t());
  std::uint64_t limbs[4] = {0, 0, 0, 0};
  mpz_export(limbs, nullptr, -1, sizeof(std::uint64_t), 0, 0, r.get_mpz_t());
  Scalar out;
  blst_fr_from_uint64(&out.v_, limbs);
  return out;
}

Scalar Scalar::random(RandomSource& rng) {
  // 64 bytes reduced mod p: bias below 2^-256.
  std::array<std::uint8_t, 64> buf{};
  rng.fill(buf);
  blst_scalar s;
  blst_scalar_from_le_bytes(&s, buf.data(), buf.size());
  Scalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

Scalar Scalar::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kScalarBytes) {
    throw Error(ErrorCode::kBadEncoding, "scalar: expected 32 bytes");
  }
  blst_scalar s;
  blst_scalar_from_bendian(&s, bytes.data());
  if (!blst_scalar_fr_check(&s)) {
    throw Error(ErrorCode::kBadEncoding, "scalar: value not below group order");
  }
  Scalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

std::array<std::uint8_t, kScalarBytes> Scalar::encode() const {
  std::array<std::uint8_t, kScalarBytes> out{};
  const blst_scalar s = to_blst_scalar(*this);
  blst_bendian_from_scalar(out.data(), &s);
  return out;
}

BigInt Scalar::to_bigint() const {
  std::uint64_t limbs[4];
  blst_uint64_from_fr(limbs, &v_);
  return limbs_to_bigint(limbs);
}

std::optional<std::int64_t> Scalar::to_signed() const {
  std::uint64_t limbs[4];
  blst_uint64_from_fr(limbs, &v_);
  if (limbs[1] == 0 && limbs[2] == 0 && limbs[3] == 0 &&
      limbs[0] <= std::uint64_t(INT64_MAX)) {
    return std::int64_t(limbs[0]);
  }
  blst_fr neg;
  blst_fr_cneg(&neg, &v_, true);
  blst_uint64_from_fr(limbs, &neg);
  if (limbs[1] == 0 && limbs[2] == 0 && limbs[3] == 0 &&
      limbs[0] <= std::uint64_t(INT64_MAX) + 1) {
    return std::int64_t(std::uint64_t(0) - limbs[0]);
  }
  return std::nullopt;
}

bool Scalar::is_zero() const {
  static const blst_fr zero{};
  return std::memcmp(&v_, &zero, sizeof(v_)) == 0;
}

Scalar Scalar::inverse() const {
  Scalar out;
  if (!is_zero()) blst_fr_inverse(&out.v_, &v_);
  return out;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar out;
  blst_fr_add(&out.v_, &v_, &o.v_);
  return out;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar out;
  blst_fr_sub(&out.v_, &v_, &o.v_);
  return out;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar out;
  blst_fr_mul(&out.v_, &v_, &o.v_);
  return out;
}

Scalar Scalar::operator-() const {
  Scalar out;
  blst_fr_cneg(&out.v_, &v_, true);
  return out;
}

bool Scalar::operator==(const Scalar& o) const {
  return std::memcmp(&v_, &o.v_, sizeof(v_)) == 0;
}

// ---- G1 -------------------------------------------------------------------

G1::G1() { std::memset(&p_, 0, sizeof(p_)); }

G1 G1::generator() {
  G1 out;
  out.p_ = *blst_p1_generator();
  return out;
}

G1 G1::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kG1Bytes) {
    throw Error(ErrorCode::kBadEncoding, "G1: expected 48 bytes");
  }
  blst_p1_affine aff;
  if (blst_p1_uncompress(&aff, bytes.data()) != BLST_SUCCESS) {
    throw Error(ErrorCode::kBadEncoding, "G1: invalid point encoding");
  }
  if (!blst_p1_affine_is_inf(&aff) && !blst_p1_affine_in_g1(&aff)) {
    throw Error(ErrorCode::kBadEncoding, "G1: point not in prime-order subgroup");
  }
  G1 out;
  blst_p1_from_affine(&out.p_, &aff);
  if (blst_p1_affine_is_inf(&aff)) std::memset(&out.p_, 0, sizeof(out.p_));
  const auto again = out.encode();
  if (!std::equal(again.begin(), again.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadEncoding, "G1: non-canonical encoding");
  }
  return out;
}

std::array<std::uint8_t, kG1Bytes> G1::encode() const {
  std::array<std::uint8_t, kG1Bytes> out{};
  blst_p1_compress(out.data(), &p_);
  return out;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }

blst_p1_affine G1::to_affine() const {
  blst_p1_affine aff;
  blst_p1_to_affine(&aff, &p_);
  return aff;
}

G1 G1::operator+(const G1& o) const {
  G1 out;
  blst_p1_add_or_double(&out.p_, &p_, &o.p_);
  return out;
}

G1& G1::operator+=(const G1& o) {
  blst_p1_add_or_double(&p_, &p_, &o.p_);
  return *this;
}

G1 G1::operator-() const {
  G1 out = *this;
  blst_p1_cneg(&out.p_, true);
  return out;
}

bool G1::operator==(const G1& o) const { return blst_p1_is_equal(&p_, &o.p_); }

// ---- G2 -------------------------------------------------------------------

G2::G2() { std::memset(&p_, 0, sizeof(p_)); }

G2 G2::generator() {
  G2 out;
  out.p_ = *blst_p2_generator();
  return out;
}

G2 G2::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kG2Bytes) {
    throw Error(ErrorCode::kBadEncoding, "G2: expected 96 bytes");
  }
  blst_p2_affine aff;
  if (blst_p2_uncompress(&aff, bytes.data()) != BLST_SUCCESS) {
    throw Error(ErrorCode::kBadEncoding, "G2: invalid point encoding");
  }
  if (!blst_p2_affine_is_inf(&aff) && !blst_p2_affine_in_g2(&aff)) {
    throw Error(ErrorCode::kBadEncoding, "G2: point not in prime-order subgroup");
  }
  G2 out;
  blst_p2_from_affine(&out.p_, &aff);
  if (blst_p2_affine_is_inf(&aff)) std::memset(&out.p_, 0, sizeof(out.p_));
  const auto again = out.encode();
  if (!std::equal(again.begin(), again.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadEncoding, "G2: non-canonical encoding");
  }
  return out;
}

std::array<std::uint8_t, kG2Bytes> G2::encode() const {
  std::array<std::uint8_t, kG2Bytes> out{};
  blst_p2_compress(out.data(), &p_);
  return out;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }

blst_p2_affine G2::to_affine() const {
  blst_p2_affine aff;
  blst_p2_to_affine(&aff, &p_);
  return aff;
}

G2 G2::operator+(const G2& o) const {
  G2 out;
  blst_p2_add_or_double(&out.p_, &p_, &o.p_);
  return out;
}

G2& G2::operator+=(const G2& o) {
  blst_p2_add_or_double(&p_, &p_, &o.p_);
  return *this;
}

G2 G2::operator-() const {
  G2 out = *this;
  blst_p2_cneg(&out.p_, true);
  return out;
}

bool G2::operator==(const G2& o) const { return blst_p2_is_equal(&p_, &o.p_); }

// ---- GT -------------------------------------------------------------------

GT::GT() : f_(*blst_fp12_one()) {}

GT GT::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kGTBytes) {
    throw Error(ErrorCode::kBadEncoding, "GT: expected 576 bytes");
  }
  GT out;
  std::size_t off = 0;
  for (auto& c6 : out.f_.fp6) {
    for (auto& c2 : c6.fp2) {
      for (auto& c : c2.fp) {
        blst_fp_from_bendian(&c, bytes.data() + off);
        off += 48;
      }
    }
  }
  const auto again = out.encode();
  if (!std::equal(again.begin(), again.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadEncoding, "GT: non-canonical field element");
  }
  if (!blst_fp12_in_group(&out.f_)) {
    throw Error(ErrorCode::kBadEncoding, "GT: element not in target group");
  }
  return out;
}

std::array<std::uint8_t, kGTBytes> GT::encode() const {
  std::array<std::uint8_t, kGTBytes> out{};
  std::size_t off = 0;
  for (const auto& c6 : f_.fp6) {
    for (const auto& c2 : c6.fp2) {
      for (const auto& c : c2.fp) {
        blst_bendian_from_fp(out.data() + off, &c);
        off += 48;
      }
    }
  }
  return out;
}

bool GT::is_identity() const { return blst_fp12_is_one(&f_); }

GT GT::operator*(const GT& o) const {
  GT out;
  blst_fp12_mul(&out.f_, &f_, &o.f_);
  return out;
}

GT& GT::operator*=(const GT& o) {
  blst_fp12_mul(&f_, &f_, &o.f_);
  return *this;
}

GT GT::inverse() const {
  GT out = *this;
  blst_fp12_conjugate(&out.f_);
  return out;
}

bool GT::operator==(const GT& o) const { return blst_fp12_is_equal(&f_, &o.f_); }

// ---- OpCounter ------------------------------------------------------------

OpCounts OpCounter::snapshot() const {
  return {exp_g1_.load(std::memory_order_relaxed),
          exp_g2_.load(std::memory_order_relaxed),
          exp_gt_.load(std::memory_order_relaxed),
          pairings_.load(std::memory_order_relaxed)};
}

void OpCounter::reset() {
  exp_g1_.store(0);
  exp_g2_.store(0);
  exp_gt_.store(0);
  pairings_.store(0);
}

// ---- GroupContext ---------------------------------------------------------

GroupContext GroupContext::setup(int security_level) {
  if (security_level != 128) {
    throw Error(ErrorCode::kUnsupported,
                "unsupported security level " + std::to_string(security_level) +
                    " (supported: 128)");
  }
  GroupContext ctx;
  ctx.security_level_ = security_level;
  ctx.g1_ = G1::generator();
  ctx.g2_ = G2::generator();
  const blst_p1_affine a = ctx.g1_.to_affine();
  const blst_p2_affine b = ctx.g2_.to_affine();
  blst_miller_loop(&ctx.gt_.raw(), &b, &a);
  blst_final_exp(&ctx.gt_.raw(), &ctx.gt_.raw());
  ctx.counter_ = std::make_shared<OpCounter>();
  return ctx;
}

G1 GroupContext::exp(const G1& base, std::int64_t s) const {
  counter_->add_exp_g1();
  const std::uint64_t mag = s < 0 ? std::uint64_t(0) - std::uint64_t(s) : std::uint64_t(s);
  G1 out;
  out.raw() = small_multiple(base.raw(), mag, blst_p1_add_or_double, blst_p1_double);
  return s < 0 ? -out : out;
}

G2 GroupContext::exp(const G2& base, std::int64_t s) const {
  counter_->add_exp_g2();
  const std::uint64_t mag = s < 0 ? std::uint64_t(0) - std::uint64_t(s) : std::uint64_t(s);
  G2 out;
  out.raw() = small_multiple(base.raw(), mag, blst_p2_add_or_double, blst_p2_double);
  return s < 0 ? -out : out;
}

GT GroupContext::exp(const GT& base, std::int64_t s) const {
  counter_->add_exp_gt();
  return gt_pow_small(base, s);
}

G1 GroupContext::exp(const G1& base, const Scalar& s) const {
  if (auto small = s.to_signed();
      small && std::uint64_t(*small < 0 ? -*small : *small) < kSmallExponent) {
    return exp(base, *small);
  }
  counter_->add_exp_g1();
  const blst_scalar k = to_blst_scalar(s);
  G1 out;
  blst_p1_mult(&out.raw(), &base.raw(), k.b, 255);
  return out;
}

G2 GroupContext::exp(const G2& base, const Scalar& s) const {
  if (auto small = s.to_signed();
      small && std::uint64_t(*small < 0 ? -*small : *small) < kSmallExponent) {
    return exp(base, *small);
  }
  counter_->add_exp_g2();
  const blst_scalar k = to_blst_scalar(s);
  G2 out;
  blst_p2_mult(&out.raw(), &base.raw(), k.b, 255);
  return out;
}

GT GroupContext::exp(const GT& base, const Scalar& s) const {
  if (auto small = s.to_signed();
      small && std::uint64_t(*small < 0 ? -*small : *small) < kSmallExponent) {
    return exp(base, *small);
  }
  counter_->add_exp_gt();
  const blst_scalar k = to_blst_scalar(s);
  return gt_pow_unsigned(base, k.b, 255);
}

GT GroupContext::pair(const G1& a, const G2& b) const {
  counter_->add_pairings(1);
  GT out;
  if (a.is_identity() || b.is_identity()) return out;
  const blst_p1_affine pa = a.to_affine();
  const blst_p2_affine pb = b.to_affine();
  blst_miller_loop(&out.raw(), &pb, &pa);
  blst_final_exp(&out.raw(), &out.raw());
  return out;
}

GT GroupContext::multi_pair(std::span<const std::pair<G1, G2>> pairs) const {
  if (pairs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "multi_pair: empty pair list");
  }
  counter_->add_pairings(pairs.size());

  std::vector<blst_p1> g1s;
  std::vector<blst_p2> g2s;
  g1s.reserve(pairs.size());
  g2s.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    // e(O, .) = e(., O) = 1
    if (a.is_identity() || b.is_identity()) continue;
    g1s.push_back(a.raw());
    g2s.push_back(b.raw());
  }
  GT out;
  if (g1s.empty()) return out;

  // Batch affine conversion shares one field inversion per group.
  std::vector<blst_p1_affine> p_aff(g1s.size());
  std::vector<blst_p2_affine> q_aff(g2s.size());
  const blst_p1* p_ptrs[2] = {g1s.data(), nullptr};
  const blst_p2* q_ptrs[2] = {g2s.data(), nullptr};
  blst_p1s_to_affine(p_aff.data(), p_ptrs, g1s.size());
  blst_p2s_to_affine(q_aff.data(), q_ptrs, g2s.size());

  const blst_p1_affine* ps[2] = {p_aff.data(), nullptr};
  const blst_p2_affine* qs[2] = {q_aff.data(), nullptr};
  blst_miller_loop_n(&out.raw(), qs, ps, p_aff.size());
  blst_final_exp(&out.raw(), &out.raw());
  return out;
}

}  // namespace qfe
