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

#ifndef QFE_PROJECTION_HPP_
#define QFE_PROJECTION_HPP_

// Linear homomorphism of the ciphertext: from Enc(x, y) under (s, t), anyone
// can compute Enc(Ux, Vy) under (Us, Vt) by taking the same linear
// combinations of the a_i (resp. b_i) in the group. Keys for the projected
// ciphertext are issued with projected_keygen.

#include <array>
#include <cstddef>
#include <cstdint>

#include "qfe/group.hpp"
#include "qfe/matrix.hpp"
#include "qfe/scheme.hpp"

namespace qfe {

struct ProjectionPair {
  IntMatrix u;  // d x n, applied to x
  IntMatrix v;  // d x n, applied to y

  std::size_t out_dim() const { return u.rows(); }
  std::size_t in_dim() const { return u.cols(); }
  // Throws kDimensionMismatch unless U and V are both d x n with d <= n.
  void validate() const;
};

using Digest = std::array<std::uint8_t, 32>;

struct ProjectedCiphertext {
  Ciphertext ct;      // dimension d, same c_gamma as the source
  Digest provenance;  // SHA-256 of the source ciphertext encoding
  // Plaintext bounds after projection: n * max|U| * Bx (likewise for y).
  BigInt bound_x;
  BigInt bound_y;
};

// SHA-256 over c_gamma, then a_i and b_i in index order (compressed points).
Digest ciphertext_digest(const Ciphertext& ct);

// a'_k = sum_i U_ki a_i and b'_k = sum_i V_ki b_i. Zero entries are skipped;
// a dense pair costs 2dn exponentiations in G1 and 2dn in G2.
ProjectedCiphertext project(const GroupContext& group, const Ciphertext& ct,
                            const ProjectionPair& proj, const FunctionClass& source);

// g2^{q(Us, Vt)}: the key for q on the projected ciphertext.
FunctionalKey projected_keygen(const GroupContext& group, const MasterSecretKey& msk,
                               const ProjectionPair& proj, const QuadraticForm& q);

// (Us, Vt) computed in Z_p.
std::pair<std::vector<Scalar>, std::vector<Scalar>> project_secret(
    const MasterSecretKey& msk, const ProjectionPair& proj);

}  // namespace qfe

#endif  // QFE_PROJECTION_HPP_
