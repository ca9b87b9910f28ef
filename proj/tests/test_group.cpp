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
#include "qfe/group.hpp"
#include "test_support.hpp"

using namespace qfe;
using qfe::testing::big;
using qfe::testing::mod_p;

TEST_CASE("setup_group returns a 128-bit BLS12-381 context") {
  const auto g = GroupContext::setup(128);
  CHECK(g.curve_id() == "BLS12-381");
  CHECK(mpz_sizeinbase(g.order().get_mpz_t(), 2) >= 255);
  CHECK(mpz_probab_prime_p(g.order().get_mpz_t(), 40) > 0);
  CHECK(g.pair(g.g1(), g.g2()) == g.gt());
  CHECK_FALSE(g.gt().is_identity());
}

TEST_CASE("setup_group rejects unsupported security levels") {
  for (int level : {0, 80, 192, 256}) {
    try {
      GroupContext::setup(level);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnsupported);
    }
  }
}

TEST_CASE("generators have order p") {
  const auto g = GroupContext::setup();
  const Scalar p_minus_1 = Scalar::from_bigint(g.order() - 1);
  CHECK((g.exp(g.g1(), p_minus_1) + g.g1()).is_identity());
  CHECK((g.exp(g.g2(), p_minus_1) + g.g2()).is_identity());
  CHECK((g.exp(g.gt(), p_minus_1) * g.gt()).is_identity());
  // p reduces to zero as a scalar.
  CHECK(Scalar::from_bigint(g.order()).is_zero());
}

TEST_CASE("exp examples") {
  const auto g = GroupContext::setup();
  CHECK(g.exp(g.g1(), Scalar::from_int(0)).is_identity());
  CHECK(g.exp(g.g1(), Scalar::from_int(1)) == g.g1());
  CHECK(g.exp(g.g2(), Scalar::from_int(0)).is_identity());
  CHECK(g.exp(g.gt(), Scalar::from_int(0)).is_identity());
  CHECK(g.exp(g.g1(), std::int64_t{-1}) == -g.g1());
  CHECK(g.exp(g.g1(), std::int64_t{2}) == g.g1() + g.g1());
}

TEST_CASE("GT exponent law against the group-law oracle") {
  const auto g = GroupContext::setup();
  SeededRandom rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Scalar a = Scalar::random(rng);
    const Scalar b = Scalar::random(rng);
    CHECK(g.exp(g.gt(), a) * g.exp(g.gt(), b) == g.exp(g.gt(), a + b));
  }
}

TEST_CASE("small and full exponent paths agree") {
  const auto g = GroupContext::setup();
  qfe::testing::Gen gen(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::int64_t k = gen.uniform(-100000, 100000);
    // k + p*big never fits the small path, so this goes through blst_p*_mult.
    const Scalar full = Scalar::from_bigint(big(k));
    const G1 expect1 = g.exp(g.g1(), k);
    CHECK(expect1 == g.exp(g.g1(), full));
    const std::int64_t r = std::abs(k % 17);
    G1 sum;
    for (std::int64_t i = 0; i < r; ++i) sum += g.g1();
    CHECK(sum == g.exp(g.g1(), r));
    SeededRandom rng{static_cast<std::uint64_t>(trial)};
    const Scalar big_s = Scalar::random(rng);
    CHECK(g.exp(g.exp(g.g2(), big_s), k) == g.exp(g.g2(), big_s * Scalar::from_int(k)));
    CHECK(g.exp(g.exp(g.gt(), big_s), k) == g.exp(g.gt(), big_s * Scalar::from_int(k)));
  }
}

TEST_CASE("pair examples") {
  const auto g = GroupContext::setup();
  CHECK(g.pair(g.g1(), g.g2()) == g.gt());
  CHECK(g.pair(g.exp(g.g1(), std::int64_t{2}), g.exp(g.g2(), std::int64_t{3})) ==
        g.exp(g.gt(), std::int64_t{6}));
  CHECK(g.pair(G1(), g.g2()).is_identity());
  CHECK(g.pair(g.g1(), G2()).is_identity());
}

TEST_CASE("bilinearity over 100 random exponent pairs") {
  const auto g = GroupContext::setup();
  SeededRandom rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Scalar a = Scalar::random(rng);
    const Scalar b = Scalar::random(rng);
    // Exponent computed as an integer product reduced mod p.
    const Scalar ab = Scalar::from_bigint(mod_p(a.to_bigint() * b.to_bigint()));
    CHECK(g.pair(g.exp(g.g1(), a), g.exp(g.g2(), b)) == g.exp(g.gt(), ab));
  }
}

TEST_CASE("multi_pair") {
  const auto g = GroupContext::setup();
  SUBCASE("single generator pair") {
    const std::pair<G1, G2> one[] = {{g.g1(), g.g2()}};
    CHECK(g.multi_pair(one) == g.gt());
  }
  SUBCASE("inner-product oracle") {
    qfe::testing::Gen gen(3);
    for (std::size_t len : {1u, 2u, 5u, 17u, 33u}) {
      const auto u = gen.vec(len, -1000, 1000);
      const auto v = gen.vec(len, -1000, 1000);
      std::vector<std::pair<G1, G2>> pairs;
      std::int64_t dot = 0;
      for (std::size_t i = 0; i < len; ++i) {
        pairs.emplace_back(g.exp(g.g1(), u[i]), g.exp(g.g2(), v[i]));
        dot += u[i] * v[i];
      }
      CHECK(g.multi_pair(pairs) == g.exp(g.gt(), dot));
    }
  }
  SUBCASE("equals the product of single pairings") {
    SeededRandom rng(4);
    const Scalar a = Scalar::random(rng), b = Scalar::random(rng);
    const Scalar c = Scalar::random(rng), d = Scalar::random(rng);
    const std::pair<G1, G2> pairs[] = {{g.exp(g.g1(), a), g.exp(g.g2(), b)},
                                       {g.exp(g.g1(), c), g.exp(g.g2(), d)}};
    CHECK(g.multi_pair(pairs) ==
          g.pair(pairs[0].first, pairs[0].second) * g.pair(pairs[1].first, pairs[1].second));
  }
  SUBCASE("identity entries contribute one") {
    const std::pair<G1, G2> pairs[] = {{G1(), g.g2()}, {g.g1(), g.g2()}, {g.g1(), G2()}};
    CHECK(g.multi_pair(pairs) == g.gt());
  }
  SUBCASE("empty list is an error") {
    CHECK_THROWS_AS(g.multi_pair({}), Error);
  }
}

TEST_CASE("op counter reflects exp and pair calls exactly") {
  const auto g = GroupContext::setup();
  const auto other = GroupContext::setup();
  SeededRandom rng(5);
  const Scalar s = Scalar::random(rng);
  const OpCounts counts = g.measure([&] {
    g.exp(g.g1(), s);
    g.exp(g.g1(), std::int64_t{3});
    g.exp(g.g2(), s);
    g.exp(g.gt(), s);
    g.exp(g.gt(), std::int64_t{-2});
    g.pair(g.g1(), g.g2());
    const std::pair<G1, G2> pairs[] = {{g.g1(), g.g2()}, {G1(), g.g2()}, {g.g1(), g.g2()}};
    g.multi_pair(pairs);
  });
  CHECK(counts == OpCounts{2, 1, 2, 4});
  // Independent contexts never share counters; copies do.
  CHECK(other.counter().snapshot() == OpCounts{});
  const GroupContext copy = g;
  copy.exp(copy.g1(), s);
  CHECK(g.counter().snapshot().exp_g1 == 3);
  g.counter().reset();
  CHECK(g.counter().snapshot() == OpCounts{});
}

TEST_CASE("canonical encodings round-trip in all three groups") {
  const auto g = GroupContext::setup();
  SeededRandom rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Scalar s = Scalar::random(rng);
    const G1 a = g.exp(g.g1(), s);
    const G2 b = g.exp(g.g2(), s);
    const GT c = g.exp(g.gt(), s);
    CHECK(G1::decode(a.encode()) == a);
    CHECK(G2::decode(b.encode()) == b);
    CHECK(GT::decode(c.encode()) == c);
    CHECK(Scalar::decode(s.encode()) == s);
  }
  CHECK(G1::decode(G1().encode()).is_identity());
  CHECK(G2::decode(G2().encode()).is_identity());
  CHECK(GT::decode(GT().encode()).is_identity());
}

TEST_CASE("decoding rejects malformed elements") {
  const auto g = GroupContext::setup();
  auto e1 = g.g1().encode();
  e1[47] ^= 0x01;  // almost surely off the curve
  CHECK_THROWS_AS(G1::decode(e1), Error);
  CHECK_THROWS_AS(G1::decode(std::vector<std::uint8_t>(47, 0)), Error);
  auto e2 = g.g2().encode();
  e2[95] ^= 0x01;
  CHECK_THROWS_AS(G2::decode(e2), Error);
  auto et = g.gt().encode();
  et[575] ^= 0x01;  // leaves the cyclotomic subgroup
  CHECK_THROWS_AS(GT::decode(et), Error);
  std::vector<std::uint8_t> too_big(32, 0xff);
  CHECK_THROWS_AS(Scalar::decode(too_big), Error);
}

TEST_CASE("scalar centered lift") {
  CHECK(Scalar::from_int(-5).to_signed() == -5);
  CHECK(Scalar::from_int(INT64_MAX).to_signed() == INT64_MAX);
  CHECK(Scalar::from_int(INT64_MIN).to_signed() == INT64_MIN);
  CHECK(Scalar::from_int(0).to_signed() == 0);
  CHECK_FALSE(Scalar::from_bigint(group_order() / 2).to_signed().has_value());
  CHECK(Scalar::from_int(-5).to_bigint() == group_order() - 5);
  CHECK((Scalar::from_int(7) * Scalar::from_int(7).inverse()) == Scalar::from_int(1));
}
