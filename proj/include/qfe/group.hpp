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

#ifndef QFE_GROUP_HPP_
#define QFE_GROUP_HPP_

// Type-3 bilinear group over BLS12-381, backed by blst.
//
// The group law of G1 and G2 is written additively here (operator+), GT
// multiplicatively (operator*). exp() is scalar multiplication resp. power.

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <blst.h>
#include <gmpxx.h>

#include "qfe/random.hpp"

namespace qfe {

using BigInt = mpz_class;

inline constexpr std::string_view kCurveId = "BLS12-381";
inline constexpr std::size_t kScalarBytes = 32;
inline constexpr std::size_t kG1Bytes = 48;
inline constexpr std::size_t kG2Bytes = 96;
inline constexpr std::size_t kGTBytes = 576;

// Element of Z_p, p the (255-bit) prime order of G1, G2 and GT.
class Scalar {
 public:
  Scalar();  // zero

  static Scalar from_int(std::int64_t v);
  // Reduces any integer (negative included) modulo p.
  static Scalar from_bigint(const BigInt& v);
  static Scalar random(RandomSource& rng);
  // Canonical 32-byte big-endian encoding; rejects values >= p.
  static Scalar decode(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kScalarBytes> encode() const;
  BigInt to_bigint() const;  // in [0, p)
  // Centered lift into [-p/2, p/2) when it fits in 64 bits.
  std::optional<std::int64_t> to_signed() const;

  bool is_zero() const;
  Scalar inverse() const;  // zero maps to zero

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  bool operator==(const Scalar& o) const;

  const blst_fr& raw() const { return v_; }

 private:
  blst_fr v_;
};

// Prime order p as a big integer.
const BigInt& group_order();

class G1 {
 public:
  G1();  // identity
  static G1 generator();
  // Compressed 48-byte encoding; rejects off-curve and non-subgroup points.
  static G1 decode(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kG1Bytes> encode() const;
  bool is_identity() const;
  blst_p1_affine to_affine() const;

  G1 operator+(const G1& o) const;
  G1& operator+=(const G1& o);
  G1 operator-() const;
  bool operator==(const G1& o) const;

  const blst_p1& raw() const { return p_; }
  blst_p1& raw() { return p_; }

 private:
  blst_p1 p_;
};

class G2 {
 public:
  G2();  // identity
  static G2 generator();
  static G2 decode(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kG2Bytes> encode() const;
  bool is_identity() const;
  blst_p2_affine to_affine() const;

  G2 operator+(const G2& o) const;
  G2& operator+=(const G2& o);
  G2 operator-() const;
  bool operator==(const G2& o) const;

  const blst_p2& raw() const { return p_; }
  blst_p2& raw() { return p_; }

 private:
  blst_p2 p_;
};

class GT {
 public:
  GT();  // identity (one)
  // 576 bytes: the twelve Fp coefficients big-endian, in blst tower order.
  static GT decode(std::span<const std::uint8_t> bytes);

  std::array<std::uint8_t, kGTBytes> encode() const;
  bool is_identity() const;

  GT operator*(const GT& o) const;
  GT& operator*=(const GT& o);
  // Inverse; conjugation suffices in the cyclotomic subgroup.
  GT inverse() const;
  bool operator==(const GT& o) const;

  const blst_fp12& raw() const { return f_; }
  blst_fp12& raw() { return f_; }

 private:
  blst_fp12 f_;
};

struct OpCounts {
  std::uint64_t exp_g1 = 0;
  std::uint64_t exp_g2 = 0;
  std::uint64_t exp_gt = 0;
  std::uint64_t pairings = 0;

  std::uint64_t exponentiations() const { return exp_g1 + exp_g2 + exp_gt; }
  OpCounts operator-(const OpCounts& o) const {
    return {exp_g1 - o.exp_g1, exp_g2 - o.exp_g2, exp_gt - o.exp_gt,
            pairings - o.pairings};
  }
  bool operator==(const OpCounts&) const = default;
};

// Monotone operation counter; one per GroupContext (shared by its copies).
class OpCounter {
 public:
  OpCounts snapshot() const;
  void reset();

  void add_exp_g1(std::uint64_t k = 1) { exp_g1_.fetch_add(k, std::memory_order_relaxed); }
  void add_exp_g2(std::uint64_t k = 1) { exp_g2_.fetch_add(k, std::memory_order_relaxed); }
  void add_exp_gt(std::uint64_t k = 1) { exp_gt_.fetch_add(k, std::memory_order_relaxed); }
  void add_pairings(std::uint64_t k) { pairings_.fetch_add(k, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> exp_g1_{0};
  std::atomic<std::uint64_t> exp_g2_{0};
  std::atomic<std::uint64_t> exp_gt_{0};
  std::atomic<std::uint64_t> pairings_{0};
};

// Immutable group description plus its operation counter. Copies share the
// counter; independently set-up contexts never do.
class GroupContext {
 public:
  // Only 128 is supported (BLS12-381).
  static GroupContext setup(int security_level = 128);

  int security_level() const { return security_level_; }
  std::string_view curve_id() const { return kCurveId; }
  const BigInt& order() const { return group_order(); }

  const G1& g1() const { return g1_; }
  const G2& g2() const { return g2_; }
  const GT& gt() const { return gt_; }

  G1 exp(const G1& base, const Scalar& s) const;
  G2 exp(const G2& base, const Scalar& s) const;
  GT exp(const GT& base, const Scalar& s) const;
  // Small signed exponents take a short double-and-add path.
  G1 exp(const G1& base, std::int64_t s) const;
  G2 exp(const G2& base, std::int64_t s) const;
  GT exp(const GT& base, std::int64_t s) const;

  GT pair(const G1& a, const G2& b) const;
  // Product of pairings with a single final exponentiation. Counts one
  // pairing per list entry.
  GT multi_pair(std::span<const std::pair<G1, G2>> pairs) const;

  OpCounter& counter() const { return *counter_; }

  // Counts of the operations performed while running fn.
  template <typename Fn>
  OpCounts measure(Fn&& fn) const {
    const OpCounts before = counter_->snapshot();
    std::forward<Fn>(fn)();
    return counter_->snapshot() - before;
  }

 private:
  GroupContext() = default;

  int security_level_ = 128;
  G1 g1_;
  G2 g2_;
  GT gt_;
  std::shared_ptr<OpCounter> counter_;
};

}  // namespace qfe

#endif  // QFE_GROUP_HPP_
