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
#include "qfe/scheme.hpp"
#include "test_support.hpp"

using namespace qfe;
using qfe::testing::Gen;
using qfe::testing::plain_form;

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

bool same_bytes(const Ciphertext& a, const Ciphertext& b) {
  if (a.c_gamma.encode() != b.c_gamma.encode()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (int c = 0; c < 2; ++c)
      if (a.a[i][c].encode() != b.a[i][c].encode() || a.b[i][c].encode() != b.b[i][c].encode())
        return false;
  return true;
}

}  // namespace

TEST_CASE("function class validation") {
  CHECK_NOTHROW(FunctionClass{1, 1, 1, 1}.validate());
  CHECK(FunctionClass{3, 2, 5, 7}.output_bound() == 9 * 2 * 5 * 7);
  CHECK(code_of([] { FunctionClass{0, 1, 1, 1}.validate(); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { FunctionClass{2, 0, 1, 1}.validate(); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { FunctionClass{2, 1, -1, 1}.validate(); }) == ErrorCode::kInvalidArgument);
  // n^2 Bq Bx By ~ 2^(2*40 + 3*62) far above p/2.
  const std::int64_t huge = std::int64_t{1} << 62;
  CHECK(code_of([&] { FunctionClass{std::size_t{1} << 40, huge, huge, huge}.validate(); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("setup") {
  const auto g = GroupContext::setup();
  SeededRandom rng(1);
  SUBCASE("n = 1 dimensions") {
    const auto [pk, msk] = setup({1, 4, 4, 4}, g, rng);
    CHECK(pk.g1_s.size() == 1);
    CHECK(pk.g2_t.size() == 1);
    CHECK(msk.dim() == 1);
  }
  SUBCASE("pk is the componentwise exponentiation of msk") {
    const auto [pk, msk] = setup({5, 4, 4, 4}, g, rng);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(pk.g1_s[i] == g.exp(g.g1(), msk.s[i]));
      CHECK(pk.g2_t[i] == g.exp(g.g2(), msk.t[i]));
    }
  }
  SUBCASE("fresh secrets per call") {
    const auto [pk1, msk1] = setup({3, 4, 4, 4}, g, rng);
    const auto [pk2, msk2] = setup({3, 4, 4, 4}, g, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK_FALSE(msk1.s[i] == msk2.s[i]);
      CHECK_FALSE(msk1.t[i] == msk2.t[i]);
    }
  }
  SUBCASE("system randomness") {
    SystemRandom sys;
    const auto [pk1, msk1] = setup({2, 4, 4, 4}, g, sys);
    const auto [pk2, msk2] = setup({2, 4, 4, 4}, g, sys);
    CHECK_FALSE(msk1.s[0] == msk2.s[0]);
  }
  SUBCASE("invalid class") {
    CHECK(code_of([&] { setup({0, 4, 4, 4}, g, rng); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("keygen") {
  const auto g = GroupContext::setup();
  SeededRandom rng(2);
  const FunctionClass fc{4, 8, 8, 8};
  const auto [pk, msk] = setup(fc, g, rng);

  CHECK(keygen(g, msk, QuadraticForm::zero(4)).k.is_identity());

  IntMatrix single(4, 4);
  single(0, 0) = 1;
  CHECK(keygen(g, msk, QuadraticForm(single)).k ==
        g.exp(g.g2(), msk.s[0] * msk.t[0]));

  Gen gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const IntMatrix q = gen.matrix(4, 4, -8, 8);
    const BigInt e = qfe::testing::exponent_form(q, msk.s, msk.t);
    CHECK(keygen(g, msk, QuadraticForm(q)).k == g.exp(g.g2(), Scalar::from_bigint(e)));
  }
  CHECK(code_of([&] { keygen(g, msk, QuadraticForm::zero(3)); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { QuadraticForm(IntMatrix(2, 3)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("ciphertext exponent structure") {
  // e(g1^{a_i}, g2^{b_j}) over both components gives x_i y_j - gamma s_i t_j;
  // multiplying by e(g1^gamma, g2^{s_i t_j}) must leave gT^{x_i y_j}.
  const auto g = GroupContext::setup();
  SeededRandom rng(4);
  const FunctionClass fc{3, 16, 16, 8};
  const auto [pk, msk] = setup(fc, g, rng);
  const std::vector<std::int64_t> x{3, -16, 0}, y{-5, 7, 16};
  const Ciphertext ct = encrypt(pk, x, y, fc, rng);
  CHECK(ct.dim() == 3);
  CHECK(ct.b.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const std::pair<G1, G2> terms[] = {
          {ct.a[i][0], ct.b[j][0]},
          {ct.a[i][1], ct.b[j][1]},
          {ct.c_gamma, g.exp(g.g2(), msk.s[i] * msk.t[j])}};
      CHECK(g.multi_pair(terms) == g.exp(g.gt(), x[i] * y[j]));
    }
}

TEST_CASE("encrypt") {
  const auto g = GroupContext::setup();
  SeededRandom rng(5);
  const FunctionClass fc{2, 4, 4, 4};
  const auto [pk, msk] = setup(fc, g, rng);
  const auto table = DlogTable::build(g, fc.output_bound().get_si());
  const std::vector<std::int64_t> x{1, -2}, y{3, 4};

  SUBCASE("zero form decrypts to 0") {
    const auto ct = encrypt(pk, x, y, fc, rng);
    const auto dk = keygen(g, msk, QuadraticForm::zero(2));
    const OpCounts ops = g.measure([&] { CHECK(decrypt(pk, ct, dk, table) == 0); });
    CHECK(ops.pairings == 1);
  }
  SUBCASE("randomized: 100 encryptions are pairwise distinct") {
    std::vector<Ciphertext> cts;
    for (int i = 0; i < 100; ++i) cts.push_back(encrypt(pk, x, y, fc, rng));
    for (std::size_t i = 0; i < cts.size(); ++i)
      for (std::size_t j = i + 1; j < cts.size(); ++j) CHECK_FALSE(same_bytes(cts[i], cts[j]));
  }
  SUBCASE("out-of-bound plaintext") {
    const std::vector<std::int64_t> bad{5, 0}, neg{0, -5};
    CHECK(code_of([&] { encrypt(pk, bad, y, fc, rng); }) == ErrorCode::kOutOfBound);
    CHECK(code_of([&] { encrypt(pk, x, neg, fc, rng); }) == ErrorCode::kOutOfBound);
  }
  SUBCASE("length mismatch") {
    const std::vector<std::int64_t> shorter{1};
    CHECK(code_of([&] { encrypt(pk, shorter, y, fc, rng); }) == ErrorCode::kDimensionMismatch);
    CHECK(code_of([&] { encrypt(pk, x, shorter, fc, rng); }) == ErrorCode::kDimensionMismatch);
  }
  SUBCASE("uses only public exponentiations") {
    // 1 for gamma, then per slot 2 G1 components of 2 terms each; same in G2.
    const OpCounts ops = g.measure([&] { encrypt(pk, x, y, fc, rng); });
    CHECK(ops.pairings == 0);
    CHECK(ops.exp_gt == 0);
    CHECK(ops.exp_g1 > 0);
    CHECK(ops.exp_g2 > 0);
  }
}

TEST_CASE("decrypt") {
  const auto g = GroupContext::setup();
  SeededRandom rng(6);

  SUBCASE("n = 1, x = 2, y = 3, q = 1 gives 6") {
    const FunctionClass fc{1, 4, 4, 4};
    const auto [pk, msk] = setup(fc, g, rng);
    const auto table = DlogTable::build(g, 64);
    const std::vector<std::int64_t> x{2}, y{3};
    const auto ct = encrypt(pk, x, y, fc, rng);
    IntMatrix q(1, 1);
    q(0, 0) = 1;
    CHECK(decrypt(pk, ct, keygen(g, msk, QuadraticForm(q)), table) == 6);
  }

  SUBCASE("random instances match the plaintext oracle") {
    Gen gen(7);
    const auto table = DlogTable::build(g, 8 * 8 * 8 * 16 * 16);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = static_cast<std::size_t>(gen.uniform(1, 8));
      const FunctionClass fc{n, 16, 16, 8};
      const auto [pk, msk] = setup(fc, g, rng);
      const auto x = gen.vec(n, -16, 16);
      const auto y = gen.vec(n, -16, 16);
      const IntMatrix q = gen.matrix(n, n, -8, 8);
      const auto ct = encrypt(pk, x, y, fc, rng);
      const BigInt expect = plain_form(q, x, y);
      CHECK(decrypt(pk, ct, keygen(g, msk, QuadraticForm(q)), table) == expect.get_si());
    }
  }

  SUBCASE("extreme inputs hit the output bound exactly") {
    const FunctionClass fc{3, 16, 16, 8};
    const auto [pk, msk] = setup(fc, g, rng);
    const std::int64_t B = fc.output_bound().get_si();
    const auto table = DlogTable::build(g, B);
    const std::vector<std::int64_t> x(3, 16), y(3, -16);
    const auto ct = encrypt(pk, x, y, fc, rng);
    IntMatrix q(3, 3, std::vector<std::int64_t>(9, 8));
    CHECK(decrypt(pk, ct, keygen(g, msk, QuadraticForm(q)), table) == -B);
  }

  SUBCASE("dense forms take 2n^2 + 1 pairings; zeros are skipped") {
    Gen gen(8);
    for (std::size_t n : {1u, 2u, 5u}) {
      const FunctionClass fc{n, 4, 4, 4};
      const auto [pk, msk] = setup(fc, g, rng);
      const auto ct = encrypt(pk, gen.vec(n, -4, 4), gen.vec(n, -4, 4), fc, rng);
      const auto dense = keygen(g, msk, QuadraticForm(gen.dense_matrix(n, n, 4)));
      OpCounts ops = g.measure([&] { decrypt_to_group(g, ct, dense); });
      CHECK(ops.pairings == 2 * n * n + 1);
      IntMatrix sparse(n, n);
      sparse(0, n - 1) = 3;
      ops = g.measure([&] { decrypt_to_group(g, ct, keygen(g, msk, QuadraticForm(sparse))); });
      CHECK(ops.pairings == 3);
    }
  }

  SUBCASE("mismatched key gives OutOfRange (probabilistic)") {
    // A key for q' on a ciphertext for another msk lands on a uniformly
    // random GT element; falling in a range of 2*1024+1 has probability ~2^-244.
    const FunctionClass fc{3, 4, 4, 4};
    const auto table = DlogTable::build(g, fc.output_bound().get_si());
    const auto [pk, msk] = setup(fc, g, rng);
    const auto [pk2, msk2] = setup(fc, g, rng);
    IntMatrix q(3, 3);
    q(1, 2) = 2;
    const std::vector<std::int64_t> x{1, 2, 3}, y{3, 2, 1};
    const auto ct = encrypt(pk, x, y, fc, rng);
    CHECK(code_of([&] { decrypt(pk, ct, keygen(g, msk2, QuadraticForm(q)), table); }) ==
          ErrorCode::kOutOfRange);
    // Key for q, but the public form swapped for q': same outcome.
    FunctionalKey forged = keygen(g, msk, QuadraticForm(q));
    IntMatrix q2(3, 3);
    q2(2, 1) = 2;
    forged.form = QuadraticForm(q2);
    CHECK(code_of([&] { decrypt(pk, ct, forged, table); }) == ErrorCode::kOutOfRange);
  }

  SUBCASE("dimension mismatch between key and ciphertext") {
    const FunctionClass fc{2, 4, 4, 4};
    const auto [pk, msk] = setup(fc, g, rng);
    const auto table = DlogTable::build(g, 64);
    const std::vector<std::int64_t> x{1, 1};
    const auto ct = encrypt(pk, x, x, fc, rng);
    const FunctionalKey dk{G2(), QuadraticForm::zero(3)};
    CHECK(code_of([&] { decrypt(pk, ct, dk, table); }) == ErrorCode::kDimensionMismatch);
  }
}
