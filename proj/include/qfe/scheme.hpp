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

#ifndef QFE_SCHEME_HPP_
#define QFE_SCHEME_HPP_

// Functional encryption for bounded quadratic forms
//   q(x, y) = sum_{i,j} q_ij x_i y_j
// over a Type-3 pairing group:
//
//   setup:   msk = (s, t) uniform in Z_p^n,  pk = (g1^s, g2^t)
//   encrypt: gamma uniform, W uniform in GL_2;
//            a_i = W^{-T} (x_i, gamma s_i),  b_i = W (y_i, -t_i)
//            ct  = (g1^gamma, {g1^{a_i}, g2^{b_i}})
//   keygen:  dk  = (g2^{q(s,t)}, q)
//   decrypt: e(g1^gamma, dk) * prod_{ij} e(g1^{a_i}, g2^{b_j})^{q_ij}
//            = gT^{q(x,y)}, since a_i . b_j = x_i y_j - gamma s_i t_j.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qfe/dlog.hpp"
#include "qfe/group.hpp"
#include "qfe/matrix.hpp"
#include "qfe/random.hpp"

namespace qfe {

// Forms q: [-Bx,Bx]^n x [-By,By]^n -> Z with |q_ij| <= Bq.
struct FunctionClass {
  std::size_t n = 1;
  std::int64_t bound_x = 1;
  std::int64_t bound_y = 1;
  std::int64_t bound_q = 1;

  // n^2 * Bq * Bx * By, the largest |q(x, y)| in the class.
  BigInt output_bound() const;
  // Throws kInvalidArgument unless bounds are positive, n >= 1 and the output
  // bound is below p/2 (decodable under the centered lift).
  void validate() const;
};

struct MasterSecretKey {
  std::vector<Scalar> s;
  std::vector<Scalar> t;

  std::size_t dim() const { return s.size(); }
};

struct PublicKey {
  GroupContext group;
  std::vector<G1> g1_s;
  std::vector<G2> g2_t;

  std::size_t dim() const { return g1_s.size(); }
};

using G1Pair = std::array<G1, 2>;
using G2Pair = std::array<G2, 2>;

// (g1^gamma, {g1^{a_i}, g2^{b_i}}_i) in G1 x (G1^2 x G2^2)^n.
struct Ciphertext {
  G1 c_gamma;
  std::vector<G1Pair> a;
  std::vector<G2Pair> b;

  std::size_t dim() const { return a.size(); }
};

class QuadraticForm {
 public:
  QuadraticForm() = default;
  explicit QuadraticForm(IntMatrix coefficients);

  static QuadraticForm zero(std::size_t n) { return QuadraticForm(IntMatrix(n, n)); }
  // sum_k diag[k] x_k y_k
  static QuadraticForm diagonal(std::span<const std::int64_t> diag);

  std::size_t dim() const { return q_.rows(); }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return q_(i, j); }
  const IntMatrix& coefficients() const { return q_; }
  std::size_t nonzeros() const { return q_.nonzeros(); }

  // Throws kOutOfBound if some |q_ij| > bound_q, kDimensionMismatch if the
  // dimension differs from fc.n.
  void check(const FunctionClass& fc) const;

  bool operator==(const QuadraticForm&) const = default;

 private:
  IntMatrix q_;
};

struct FunctionalKey {
  G2 k;
  QuadraticForm form;
};

std::pair<PublicKey, MasterSecretKey> setup(const FunctionClass& fc,
                                            const GroupContext& group,
                                            RandomSource& rng);

// Public-key only: g1^{gamma s_i} is obtained as (g1^{s_i})^gamma.
Ciphertext encrypt(const PublicKey& pk, std::span<const std::int64_t> x,
                   std::span<const std::int64_t> y, const FunctionClass& fc,
                   RandomSource& rng);

FunctionalKey keygen(const GroupContext& group, const MasterSecretKey& msk,
                     const QuadraticForm& q);

// The group element gT^{q(x,y)}; zero coefficients are skipped, so the
// pairing count is 2 * nonzeros(q) + 1.
GT decrypt_to_group(const GroupContext& group, const Ciphertext& ct,
                    const FunctionalKey& dk);

// q(x, y), recovered through the table. Throws kOutOfRange when the result
// is outside the table bound (wrong key, or a bound miscomputed upstream).
std::int64_t decrypt(const PublicKey& pk, const Ciphertext& ct,
                     const FunctionalKey& dk, const DlogTable& table);

}  // namespace qfe

#endif  // QFE_SCHEME_HPP_
