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

#include "qfe/scheme.hpp"

#include <cstdlib>
#include <string>

#include "qfe/errors.hpp"

namespace qfe {
namespace {

void check_entries(std::span<const std::int64_t> v, std::int64_t bound, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < -bound || v[i] > bound) {
      throw Error(ErrorCode::kOutOfBound,
                  std::string("encrypt: ") + name + "[" + std::to_string(i) + "] = " +
                      std::to_string(v[i]) + " outside [-" + std::to_string(bound) +
                      ", " + std::to_string(bound) + "]");
    }
  }
}

}  // namespace

BigInt FunctionClass::output_bound() const {
  BigInt nn(static_cast<unsigned long>(n));
  return nn * nn * BigInt(static_cast<long>(bound_q)) * BigInt(static_cast<long>(bound_x)) *
         BigInt(static_cast<long>(bound_y));
}

void FunctionClass::validate() const {
  if (n == 0 || bound_x <= 0 || bound_y <= 0 || bound_q <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "function class: dimension and bounds must be positive");
  }
  if (2 * output_bound() >= group_order()) {
    throw Error(ErrorCode::kInvalidArgument,
                "function class: n^2*Bq*Bx*By must stay below p/2");
  }
}

QuadraticForm::QuadraticForm(IntMatrix coefficients) : q_(std::move(coefficients)) {
  if (q_.rows() != q_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "quadratic form: coefficient matrix not square");
  }
}

QuadraticForm QuadraticForm::diagonal(std::span<const std::int64_t> diag) {
  IntMatrix m(diag.size(), diag.size());
  for (std::size_t k = 0; k < diag.size(); ++k) m(k, k) = diag[k];
  return QuadraticForm(std::move(m));
}

void QuadraticForm::check(const FunctionClass& fc) const {
  if (dim() != fc.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "quadratic form: dimension " + std::to_string(dim()) +
                    " does not match function class " + std::to_string(fc.n));
  }
  if (q_.max_abs() > fc.bound_q) {
    throw Error(ErrorCode::kOutOfBound, "quadratic form: coefficient exceeds Bq");
  }
}

std::pair<PublicKey, MasterSecretKey> setup(const FunctionClass& fc,
                                            const GroupContext& group,
                                            RandomSource& rng) {
  fc.validate();
  MasterSecretKey msk;
  PublicKey pk{group, {}, {}};
  msk.s.reserve(fc.n);
  msk.t.reserve(fc.n);
  for (std::size_t i = 0; i < fc.n; ++i) {
    msk.s.push_back(Scalar::random(rng));
    msk.t.push_back(Scalar::random(rng));
  }
  pk.g1_s.reserve(fc.n);
  pk.g2_t.reserve(fc.n);
  for (std::size_t i = 0; i < fc.n; ++i) {
    pk.g1_s.push_back(group.exp(group.g1(), msk.s[i]));
    pk.g2_t.push_back(group.exp(group.g2(), msk.t[i]));
  }
  return {std::move(pk), std::move(msk)};
}

Ciphertext encrypt(const PublicKey& pk, std::span<const std::int64_t> x,
                   std::span<const std::int64_t> y, const FunctionClass& fc,
                   RandomSource& rng) {
  const std::size_t n = pk.dim();
  if (x.size() != n || y.size() != n || fc.n != n || pk.g2_t.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "encrypt: plaintext dimensions (" + std::to_string(x.size()) + ", " +
                    std::to_string(y.size()) + ") do not match key dimension " +
                    std::to_string(n));
  }
  check_entries(x, fc.bound_x, "x");
  check_entries(y, fc.bound_y, "y");

  const GroupContext& g = pk.group;
  const Scalar gamma = Scalar::random(rng);

  // W uniform in GL_2 by rejection on det == 0.
  Scalar w00, w01, w10, w11, det;
  do {
    w00 = Scalar::random(rng);
    w01 = Scalar::random(rng);
    w10 = Scalar::random(rng);
    w11 = Scalar::random(rng);
    det = w00 * w11 - w01 * w10;
  } while (det.is_zero());
  const Scalar inv = det.inverse();

  // W^{-T} = [[m00, m01], [m10, m11]]
  const Scalar m00 = w11 * inv;
  const Scalar m01 = -(w10 * inv);
  const Scalar m10 = -(w01 * inv);
  const Scalar m11 = w00 * inv;

  const G1 hx0 = g.exp(g.g1(), m00);
  const G1 hx1 = g.exp(g.g1(), m10);
  const Scalar cs0 = gamma * m01;
  const Scalar cs1 = gamma * m11;
  const G2 hy0 = g.exp(g.g2(), w00);
  const G2 hy1 = g.exp(g.g2(), w10);
  const Scalar ct0 = -w01;
  const Scalar ct1 = -w11;

  Ciphertext ct;
  ct.c_gamma = g.exp(g.g1(), gamma);
  ct.a.resize(n);
  ct.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ct.a[i][0] = g.exp(hx0, x[i]) + g.exp(pk.g1_s[i], cs0);
    ct.a[i][1] = g.exp(hx1, x[i]) + g.exp(pk.g1_s[i], cs1);
    ct.b[i][0] = g.exp(hy0, y[i]) + g.exp(pk.g2_t[i], ct0);
    ct.b[i][1] = g.exp(hy1, y[i]) + g.exp(pk.g2_t[i], ct1);
  }
  return ct;
}

FunctionalKey keygen(const GroupContext& group, const MasterSecretKey& msk,
                     const QuadraticForm& q) {
  const std::size_t n = msk.dim();
  if (q.dim() != n || msk.t.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "keygen: form dimension " + std::to_string(q.dim()) +
                    " does not match key dimension " + std::to_string(n));
  }
  Scalar value;
  for (std::size_t i = 0; i < n; ++i) {
    Scalar row;
    for (std::size_t j = 0; j < n; ++j) {
      if (q(i, j) != 0) row += Scalar::from_int(q(i, j)) * msk.t[j];
    }
    value += msk.s[i] * row;
  }
  return FunctionalKey{group.exp(group.g2(), value), q};
}

GT decrypt_to_group(const GroupContext& group, const Ciphertext& ct,
                    const FunctionalKey& dk) {
  const std::size_t n = ct.dim();
  if (dk.form.dim() != n || ct.b.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "decrypt: key form dimension " + std::to_string(dk.form.dim()) +
                    " does not match ciphertext dimension " + std::to_string(n));
  }
  std::vector<std::pair<G1, G2>> pairs;
  pairs.reserve(2 * dk.form.nonzeros() + 1);
  pairs.emplace_back(ct.c_gamma, dk.k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t c = dk.form(i, j);
      if (c == 0) continue;
      pairs.emplace_back(group.exp(ct.a[i][0], c), ct.b[j][0]);
      pairs.emplace_back(group.exp(ct.a[i][1], c), ct.b[j][1]);
    }
  }
  return group.multi_pair(pairs);
}

std::int64_t decrypt(const PublicKey& pk, const Ciphertext& ct,
                     const FunctionalKey& dk, const DlogTable& table) {
  return table.solve(decrypt_to_group(pk.group, ct, dk));
}

}  // namespace qfe
