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
#include "qfe/quadnet.hpp"
#include "qfe/quantizer.hpp"
#include "test_support.hpp"

using namespace qfe;
using qfe::testing::Gen;
using qfe::testing::random_model;

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

ScoreVector to_int(const std::vector<BigInt>& v) {
  ScoreVector out;
  for (const auto& z : v) out.push_back(z.get_si());
  return out;
}

struct Deployment {
  GroupContext g = GroupContext::setup();
  SeededRandom rng;
  QuadModel model;
  FunctionClass fc;
  std::pair<PublicKey, MasterSecretKey> keys;
  std::vector<FunctionalKey> dks;

  Deployment(QuadModel m, std::uint64_t seed)
      : rng(seed),
        model(std::move(m)),
        fc(input_function_class(model)),
        keys(setup(fc, g, rng)),
        dks(keygen_model(g, keys.second, model)) {}
};

}  // namespace

TEST_CASE("input function class and augmentation") {
  Gen gen(1);
  const auto m = random_model(gen, 5, 2, 3);
  const auto fc = input_function_class(m);
  CHECK(fc.n == 6);
  CHECK(fc.bound_x == 15);
  CHECK(fc.bound_y == 15);
  CHECK(fc.bound_q == 8);
  const std::vector<std::int64_t> x{4, 5};
  CHECK(augment_input(x) == std::vector<std::int64_t>{1, 4, 5});
  CHECK(augment_input({}) == std::vector<std::int64_t>{1});
}

TEST_CASE("keygen_model") {
  Gen gen(2);
  SUBCASE("zero diagonals give identity keys") {
    QuadModel m = random_model(gen, 4, 3, 2);
    for (auto& row : m.diag) std::fill(row.begin(), row.end(), 0);
    m.score_bound = 0;
    Deployment dep(m, 1);
    for (const auto& k : dep.dks) CHECK(k.k.is_identity());
  }
  SUBCASE("single unit selecting one input") {
    QuadModel m;
    m.n = 3;
    m.projection = IntMatrix(1, 4);
    m.projection(0, 1) = 1;
    m.diag = {{5}};
    m.score_bound = score_bound(m, 15).get_si();
    Deployment dep(m, 2);
    const auto& msk = dep.keys.second;
    CHECK(dep.dks[0].k == dep.g.exp(dep.g.g2(), Scalar::from_int(5) * msk.s[1] * msk.t[1]));
  }
  SUBCASE("random models against the exponent oracle") {
    const QuadModel m = random_model(gen, 6, 3, 4);
    Deployment dep(m, 3);
    const auto ps = qfe::testing::apply_big(m.projection, qfe::testing::lift(dep.keys.second.s));
    const auto pt = qfe::testing::apply_big(m.projection, qfe::testing::lift(dep.keys.second.t));
    for (std::size_t c = 0; c < m.classes(); ++c) {
      BigInt e = 0;
      for (std::size_t k = 0; k < m.hidden(); ++k) e += BigInt(long(m.diag[c][k])) * ps[k] * pt[k];
      CHECK(dep.dks[c].k == dep.g.exp(dep.g.g2(), Scalar::from_bigint(qfe::testing::mod_p(e))));
      CHECK(dep.dks[c].form == QuadraticForm::diagonal(m.diag[c]));
    }
  }
  SUBCASE("dimension mismatch") {
    const QuadModel m = random_model(gen, 4, 2, 2);
    Deployment dep(m, 4);
    const QuadModel bigger = random_model(gen, 5, 2, 2);
    CHECK(code_of([&] { keygen_model(dep.g, dep.keys.second, bigger); }) ==
          ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("encrypt_input") {
  Gen gen(3);
  const QuadModel m = random_model(gen, 5, 2, 2);
  Deployment dep(m, 5);
  const auto x = gen.vec(5, 0, 15);
  const Ciphertext ct = encrypt_input(dep.keys.first, x, dep.fc, dep.rng);
  CHECK(ct.dim() == 6);
  CHECK(ct.a.size() == 6);
  CHECK(ct.b.size() == 6);
  std::vector<std::int64_t> bad = x;
  bad[2] = 16;
  CHECK(code_of([&] { encrypt_input(dep.keys.first, bad, dep.fc, dep.rng); }) ==
        ErrorCode::kOutOfBound);
  bad[2] = -1;
  CHECK(code_of([&] { encrypt_input(dep.keys.first, bad, dep.fc, dep.rng); }) ==
        ErrorCode::kOutOfBound);
  const std::vector<std::int64_t> shorter(4, 0);
  CHECK(code_of([&] { encrypt_input(dep.keys.first, shorter, dep.fc, dep.rng); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("plaintext oracle") {
  QuadModel m;
  m.n = 3;
  m.projection = IntMatrix(1, 4);
  m.projection(0, 0) = 1;
  m.diag = {{1}};
  const std::vector<std::int64_t> x{7, 3, 1};
  CHECK(infer_plaintext_oracle(m, x) == std::vector<BigInt>{1});

  Gen gen(4);
  QuadModel a = random_model(gen, 4, 3, 3);
  QuadModel b = a;
  QuadModel sum = a;
  for (auto& row : b.diag) row = gen.vec(row.size(), -4, 3);
  for (std::size_t c = 0; c < sum.diag.size(); ++c)
    for (std::size_t k = 0; k < sum.diag[c].size(); ++k)
      sum.diag[c][k] = a.diag[c][k] + b.diag[c][k];
  const auto xs = gen.vec(4, 0, 15);
  const auto za = infer_plaintext_oracle(a, xs), zb = infer_plaintext_oracle(b, xs);
  const auto zs = infer_plaintext_oracle(sum, xs);
  for (std::size_t c = 0; c < zs.size(); ++c) CHECK(zs[c] == za[c] + zb[c]);
  CHECK_THROWS_AS(infer_plaintext_oracle(a, x), Error);
}

TEST_CASE("argmax") {
  CHECK(argmax(std::vector<std::int64_t>{3, 1, 2}) == 0);
  CHECK(argmax(std::vector<std::int64_t>{5, 5, 1}) == 0);
  CHECK(argmax(std::vector<std::int64_t>{-5, -1, -1}) == 1);
  CHECK(code_of([] { argmax(std::vector<std::int64_t>{}); }) == ErrorCode::kInvalidArgument);
  Gen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z = gen.vec(static_cast<std::size_t>(gen.uniform(1, 10)), -3, 3);
    std::size_t best = 0;
    for (std::size_t i = 1; i < z.size(); ++i)
      if (z[i] > z[best]) best = i;
    CHECK(argmax(z) == best);
  }
}

TEST_CASE("encrypted inference equals the plaintext oracle") {
  Gen gen(6);
  const QuadModel m = random_model(gen, 6, 3, 4);
  Deployment dep(m, 6);
  const auto table = DlogTable::build(dep.g, m.score_bound);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = gen.vec(6, 0, 15);
    const auto ct = encrypt_input(dep.keys.first, x, dep.fc, dep.rng);
    const ScoreVector z = infer_encrypted(dep.keys.first, ct, dep.dks, m, table);
    const ScoreVector expect = to_int(infer_plaintext_oracle(m, x));
    CHECK(z == expect);
    CHECK(argmax(z) == argmax(expect));
  }
}

TEST_CASE("all-zero image scores the bias column") {
  Gen gen(7);
  const QuadModel m = random_model(gen, 5, 3, 3);
  Deployment dep(m, 7);
  const auto table = DlogTable::build(dep.g, m.score_bound);
  const std::vector<std::int64_t> x(5, 0);
  const auto z =
      infer_encrypted(dep.keys.first, encrypt_input(dep.keys.first, x, dep.fc, dep.rng), dep.dks,
                      m, table);
  for (std::size_t c = 0; c < m.classes(); ++c) {
    std::int64_t expect = 0;
    for (std::size_t k = 0; k < m.hidden(); ++k)
      expect += m.diag[c][k] * m.projection(k, 0) * m.projection(k, 0);
    CHECK(z[c] == expect);
  }
}

TEST_CASE("all-zero diagonals decode to zeros") {
  Gen gen(8);
  QuadModel m = random_model(gen, 4, 2, 3);
  for (auto& row : m.diag) std::fill(row.begin(), row.end(), 0);
  m.score_bound = 0;
  Deployment dep(m, 8);
  const auto table = DlogTable::build(dep.g, 0);
  const auto x = gen.vec(4, 0, 15);
  CHECK(infer_encrypted(dep.keys.first, encrypt_input(dep.keys.first, x, dep.fc, dep.rng),
                        dep.dks, m, table) == ScoreVector(3, 0));
}

TEST_CASE("pairing budget is 2d + classes, cross terms independent of classes") {
  Gen gen(9);
  const std::size_t d = 4;
  const QuadModel base = random_model(gen, 8, d, 10);
  for (std::size_t classes : {1u, 3u, 10u}) {
    QuadModel m = base;
    m.diag.resize(classes);
    m.score_bound = score_bound(m, 15).get_si();
    Deployment dep(m, 9);
    const auto table = DlogTable::build(dep.g, m.score_bound);
    const auto ct = encrypt_input(dep.keys.first, gen.vec(8, 0, 15), dep.fc, dep.rng);

    const OpCounts total =
        dep.g.measure([&] { infer_encrypted(dep.keys.first, ct, dep.dks, m, table); });
    CHECK(total.pairings == 2 * d + classes);

    const auto projected = project(dep.g, ct, model_projection(m), dep.fc);
    PairingCache cache;
    const OpCounts cross = dep.g.measure([&] { cache = build_pairing_cache(dep.g, projected.ct); });
    CHECK(cross.pairings == 2 * d);
    const OpCounts per_class = dep.g.measure([&] { combine_scores(dep.g, cache, dep.dks, m); });
    CHECK(per_class.pairings == classes);
  }
}

TEST_CASE("projection cost scales with n at fixed d") {
  Gen gen(10);
  const std::size_t d = 3;
  std::uint64_t exps[2];
  for (int i = 0; i < 2; ++i) {
    const std::size_t n = i == 0 ? 15 : 31;  // augmented 16 and 32
    QuadModel m = random_model(gen, n, d, 2);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = 0; j <= n; ++j)
        if (m.projection(k, j) == 0) m.projection(k, j) = 1;
    m.score_bound = score_bound(m, 15).get_si();
    Deployment dep(m, 10);
    const auto ct = encrypt_input(dep.keys.first, gen.vec(n, 0, 15), dep.fc, dep.rng);
    exps[i] = dep.g.measure([&] { project(dep.g, ct, model_projection(m), dep.fc); })
                  .exponentiations();
    CHECK(exps[i] == 4 * d * (n + 1));
  }
  CHECK(double(exps[1]) / double(exps[0]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("infer_encrypted rejects inconsistent inputs") {
  Gen gen(11);
  const QuadModel m = random_model(gen, 4, 2, 3);
  Deployment dep(m, 11);
  const auto ct = encrypt_input(dep.keys.first, gen.vec(4, 0, 15), dep.fc, dep.rng);
  const auto table = DlogTable::build(dep.g, m.score_bound);

  if (m.score_bound > 0) {
    const auto small = DlogTable::build(dep.g, m.score_bound - 1);
    CHECK(code_of([&] { infer_encrypted(dep.keys.first, ct, dep.dks, m, small); }) ==
          ErrorCode::kInvalidArgument);
  }
  const std::vector<FunctionalKey> fewer(dep.dks.begin(), dep.dks.end() - 1);
  CHECK(code_of([&] { infer_encrypted(dep.keys.first, ct, fewer, m, table); }) ==
        ErrorCode::kDimensionMismatch);
  QuadModel other = m;
  other.diag[1][0] += other.diag[1][0] == 7 ? -1 : 1;
  CHECK(code_of([&] { infer_encrypted(dep.keys.first, ct, dep.dks, other, table); }) ==
        ErrorCode::kDimensionMismatch);
  const QuadModel wider = random_model(gen, 5, 2, 3);
  CHECK(code_of([&] { infer_encrypted(dep.keys.first, ct, dep.dks, wider, table); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("phase timings are reported") {
  Gen gen(12);
  const QuadModel m = random_model(gen, 6, 2, 2);
  Deployment dep(m, 12);
  const auto table = DlogTable::build(dep.g, m.score_bound);
  const auto ct = encrypt_input(dep.keys.first, gen.vec(6, 0, 15), dep.fc, dep.rng);
  InferTimings t;
  t.projection_ms = -1;
  infer_encrypted(dep.keys.first, ct, dep.dks, m, table, &t);
  CHECK(t.projection_ms >= 0);
  CHECK(t.pairing_ms > 0);
  CHECK(t.combine_ms > 0);
  CHECK(t.dlog_ms >= 0);
  CHECK(t.evaluation_ms() == doctest::Approx(t.projection_ms + t.pairing_ms + t.combine_ms));
}
