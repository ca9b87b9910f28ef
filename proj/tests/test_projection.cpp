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

#include <doctest.h>

#include <vector>

#include "qfe/errors.hpp"
#include "qfe/projection.hpp"
#include "test_support.hpp"

using namespace qfe;
using qfe::testing::apply_big;
using qfe::testing::Gen;
using qfe::testing::lift;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

struct Fixture {
  GroupContext g = GroupContext::setup();
  SeededRandom rng{21};
  FunctionClass fc;
  std::pair<PublicKey, MasterSecretKey> keys;
  PublicKey& pk = keys.first;
  MasterSecretKey& msk = keys.second;

  explicit Fixture(FunctionClass c) : fc(c), keys(setup(fc, g, rng)) {}
};

// sum_{k,l} q_kl (Ux)_k (Vy)_l over the integers.
BigInt composed_oracle(const IntMatrix& q, const ProjectionPair& p,
                       const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
  const auto ux = apply_big(p.u, lift(x));
  const auto vy = apply_big(p.v, lift(y));
  BigInt acc = 0;
  for (std::size_t k = 0; k < q.rows(); ++k)
    for (std::size_t l = 0; l < q.cols(); ++l) acc += BigInt(long(q(k, l))) * ux[k] * vy[l];
  return acc;
}

}  // namespace

TEST_CASE("projection pair validation") {
  CHECK_NOTHROW((ProjectionPair{IntMatrix(2, 3), IntMatrix(2, 3)}.validate()));
  CHECK(code_of([] { ProjectionPair{IntMatrix(4, 3), IntMatrix(4, 3)}.validate(); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { ProjectionPair{IntMatrix(2, 3), IntMatrix(2, 4)}.validate(); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { ProjectionPair{IntMatrix(2, 3), IntMatrix(1, 3)}.validate(); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("identity projection decrypts like the original") {
  Fixture f({4, 8, 8, 4});
  Gen gen(1);
  const auto x = gen.vec(4, -8, 8), y = gen.vec(4, -8, 8);
  const auto ct = encrypt(f.pk, x, y, f.fc, f.rng);
  const ProjectionPair id{IntMatrix::identity(4), IntMatrix::identity(4)};
  const auto pct = project(f.g, ct, id, f.fc);
  const auto table = DlogTable::build(f.g, 16 * 4 * 64);
  for (int trial = 0; trial < 5; ++trial) {
    const QuadraticForm q(gen.matrix(4, 4, -4, 4));
    CHECK(projected_keygen(f.g, f.msk, id, q).k == keygen(f.g, f.msk, q).k);
    CHECK(decrypt(f.pk, pct.ct, projected_keygen(f.g, f.msk, id, q), table) ==
          decrypt(f.pk, ct, keygen(f.g, f.msk, q), table));
  }
}

TEST_CASE("rank-1 projection") {
  Fixture f({5, 8, 8, 1});
  Gen gen(2);
  const auto x = gen.vec(5, -8, 8), y = gen.vec(5, -8, 8);
  const ProjectionPair p{gen.matrix(1, 5, -7, 7), gen.matrix(1, 5, -7, 7)};
  const auto ct = encrypt(f.pk, x, y, f.fc, f.rng);
  const auto pct = project(f.g, ct, p, f.fc);
  IntMatrix one(1, 1);
  one(0, 0) = 1;
  const auto dk = projected_keygen(f.g, f.msk, p, QuadraticForm(one));
  const auto table = DlogTable::build(f.g, 5 * 7 * 8 * 5 * 7 * 8);
  const BigInt ux = apply_big(p.u, lift(x))[0];
  const BigInt vy = apply_big(p.v, lift(y))[0];
  CHECK(decrypt(f.pk, pct.ct, dk, table) == BigInt(ux * vy).get_si());
}

TEST_CASE("zero projection gives zero for any form") {
  Fixture f({3, 8, 8, 4});
  Gen gen(3);
  const auto x = gen.vec(3, -8, 8);
  const ProjectionPair p{IntMatrix(2, 3), IntMatrix(2, 3)};
  const auto pct = project(f.g, encrypt(f.pk, x, x, f.fc, f.rng), p, f.fc);
  const auto table = DlogTable::build(f.g, 10);
  const QuadraticForm q(gen.dense_matrix(2, 2, 4));
  CHECK(decrypt(f.pk, pct.ct, projected_keygen(f.g, f.msk, p, q), table) == 0);
  CHECK(pct.bound_x == 0);
}

TEST_CASE("projected_keygen matches the exponent oracle") {
  Fixture f({6, 4, 4, 4});
  Gen gen(4);
  for (int trial = 0; trial < 5; ++trial) {
    const ProjectionPair p{gen.matrix(3, 6, -8, 7), gen.matrix(3, 6, -8, 7)};
    const IntMatrix q = gen.matrix(3, 3, -8, 7);
    const auto us = apply_big(p.u, lift(f.msk.s));
    const auto vt = apply_big(p.v, lift(f.msk.t));
    BigInt e = 0;
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t l = 0; l < 3; ++l) e += BigInt(long(q(k, l))) * us[k] * vt[l];
    const Scalar expect = Scalar::from_bigint(qfe::testing::mod_p(e));
    CHECK(projected_keygen(f.g, f.msk, p, QuadraticForm(q)).k == f.g.exp(f.g.g2(), expect));

    const auto [ps, pt] = project_secret(f.msk, p);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(ps[k] == Scalar::from_bigint(qfe::testing::mod_p(us[k])));
      CHECK(pt[k] == Scalar::from_bigint(qfe::testing::mod_p(vt[k])));
    }
  }
  const ProjectionPair p{gen.matrix(2, 6, -8, 7), gen.matrix(2, 6, -8, 7)};
  CHECK(projected_keygen(f.g, f.msk, p, QuadraticForm::zero(2)).k.is_identity());
  CHECK(code_of([&] { projected_keygen(f.g, f.msk, p, QuadraticForm::zero(3)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("homomorphism over random instances") {
  Gen gen(5);
  const auto g = GroupContext::setup();
  const auto table = DlogTable::build(g, 4000000);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.uniform(1, 7));
    const std::size_t d = static_cast<std::size_t>(gen.uniform(1, std::int64_t(n)));
    Fixture f({n, 8, 8, 1});
    const auto x = gen.vec(n, -8, 8), y = gen.vec(n, -8, 8);
    const ProjectionPair p{gen.matrix(d, n, -4, 4), gen.matrix(d, n, -4, 4)};
    const IntMatrix q = gen.matrix(d, d, -4, 4);
    const auto pct = project(f.g, encrypt(f.pk, x, y, f.fc, f.rng), p, f.fc);
    CHECK(pct.ct.dim() == d);
    const BigInt expect = composed_oracle(q, p, x, y);
    REQUIRE(abs(expect) <= 4000000);
    CHECK(decrypt(f.pk, pct.ct, projected_keygen(f.g, f.msk, p, QuadraticForm(q)), table) ==
          expect.get_si());
  }
}

TEST_CASE("project exponentiation count and bookkeeping") {
  Fixture f({6, 15, 15, 7});
  Gen gen(6);
  const auto x = gen.vec(6, 0, 15);
  const auto ct = encrypt(f.pk, x, x, f.fc, f.rng);
  for (std::size_t d : {1u, 2u, 4u}) {
    const ProjectionPair p{gen.dense_matrix(d, 6, 7), gen.dense_matrix(d, 6, 7)};
    ProjectedCiphertext pct;
    const OpCounts ops = f.g.measure([&] { pct = project(f.g, ct, p, f.fc); });
    CHECK(ops.exp_g1 == 2 * d * 6);
    CHECK(ops.exp_g2 == 2 * d * 6);
    CHECK(ops.exp_gt == 0);
    CHECK(ops.pairings == 0);
    CHECK(pct.ct.c_gamma == ct.c_gamma);
    CHECK(pct.provenance == ciphertext_digest(ct));
    CHECK(pct.bound_x == BigInt(long(6 * p.u.max_abs() * 15)));
    CHECK(pct.bound_y == BigInt(long(6 * p.v.max_abs() * 15)));
  }
  // Sparse rows cost only their nonzero entries.
  IntMatrix u(2, 6);
  u(0, 1) = 3;
  u(1, 4) = -2;
  const OpCounts ops = f.g.measure([&] { project(f.g, ct, {u, u}, f.fc); });
  CHECK(ops.exp_g1 == 4);
  CHECK(ops.exp_g2 == 4);

  CHECK(code_of([&] { project(f.g, ct, {IntMatrix(2, 5), IntMatrix(2, 5)}, f.fc); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("digest depends on every component") {
  Fixture f({2, 4, 4, 4});
  const std::vector<std::int64_t> x{1, 2};
  const auto ct = encrypt(f.pk, x, x, f.fc, f.rng);
  const Digest d0 = ciphertext_digest(ct);
  CHECK(ciphertext_digest(ct) == d0);
  auto other = ct;
  other.b[1][1] = other.b[1][1] + f.g.g2();
  CHECK(ciphertext_digest(other) != d0);
  other = ct;
  other.c_gamma = other.c_gamma + f.g.g1();
  CHECK(ciphertext_digest(other) != d0);
}
