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

#include "qfe/projection.hpp"

#include <string>

#include <sodium.h>

#include "qfe/errors.hpp"

namespace qfe {
namespace {

std::vector<Scalar> apply(const IntMatrix& m, const std::vector<Scalar>& vec) {
  std::vector<Scalar> out(m.rows());
  for (std::size_t k = 0; k < m.rows(); ++k) {
    Scalar acc;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      if (m(k, i) != 0) acc += Scalar::from_int(m(k, i)) * vec[i];
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

void ProjectionPair::validate() const {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "projection: U and V shapes differ");
  }
  if (u.rows() == 0 || u.rows() > u.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "projection: need 1 <= d <= n, got d=" + std::to_string(u.rows()) +
                    ", n=" + std::to_string(u.cols()));
  }
}

Digest ciphertext_digest(const Ciphertext& ct) {
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  const auto cg = ct.c_gamma.encode();
  crypto_hash_sha256_update(&st, cg.data(), cg.size());
  for (const auto& pair : ct.a) {
    for (const auto& e : pair) {
      const auto enc = e.encode();
      crypto_hash_sha256_update(&st, enc.data(), enc.size());
    }
  }
  for (const auto& pair : ct.b) {
    for (const auto& e : pair) {
      const auto enc = e.encode();
      crypto_hash_sha256_update(&st, enc.data(), enc.size());
    }
  }
  Digest out{};
  crypto_hash_sha256_final(&st, out.data());
  return out;
}

ProjectedCiphertext project(const GroupContext& group, const Ciphertext& ct,
                            const ProjectionPair& proj, const FunctionClass& source) {
  proj.validate();
  const std::size_t n = ct.dim();
  if (proj.in_dim() != n || source.n != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "project: projection expects dimension " + std::to_string(proj.in_dim()) +
                    ", ciphertext has " + std::to_string(n));
  }
  const std::size_t d = proj.out_dim();

  ProjectedCiphertext out;
  out.ct.c_gamma = ct.c_gamma;
  out.ct.a.resize(d);
  out.ct.b.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    G1Pair acc_a;
    G2Pair acc_b;
    for (std::size_t i = 0; i < n; ++i) {
      if (const std::int64_t c = proj.u(k, i); c != 0) {
        acc_a[0] += group.exp(ct.a[i][0], c);
        acc_a[1] += group.exp(ct.a[i][1], c);
      }
      if (const std::int64_t c = proj.v(k, i); c != 0) {
        acc_b[0] += group.exp(ct.b[i][0], c);
        acc_b[1] += group.exp(ct.b[i][1], c);
      }
    }
    out.ct.a[k] = acc_a;
    out.ct.b[k] = acc_b;
  }
  out.provenance = ciphertext_digest(ct);
  const BigInt nn(static_cast<unsigned long>(n));
  out.bound_x = nn * BigInt(static_cast<long>(proj.u.max_abs())) *
                BigInt(static_cast<long>(source.bound_x));
  out.bound_y = nn * BigInt(static_cast<long>(proj.v.max_abs())) *
                BigInt(static_cast<long>(source.bound_y));
  return out;
}

std::pair<std::vector<Scalar>, std::vector<Scalar>> project_secret(
    const MasterSecretKey& msk, const ProjectionPair& proj) {
  proj.validate();
  if (proj.in_dim() != msk.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "projected keygen: projection expects dimension " +
                    std::to_string(proj.in_dim()) + ", key has " + std::to_string(msk.dim()));
  }
  return {apply(proj.u, msk.s), apply(proj.v, msk.t)};
}

FunctionalKey projected_keygen(const GroupContext& group, const MasterSecretKey& msk,
                               const ProjectionPair& proj, const QuadraticForm& q) {
  auto [us, vt] = project_secret(msk, proj);
  if (q.dim() != proj.out_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "projected keygen: form dimension " + std::to_string(q.dim()) +
                    " does not match projection rows " + std::to_string(proj.out_dim()));
  }
  return keygen(group, MasterSecretKey{std::move(us), std::move(vt)}, q);
}

}  // namespace qfe
