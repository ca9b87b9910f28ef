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

#include <cstdlib>
#include <sstream>
#include <thread>
#include <vector>

#include "qfe/dlog.hpp"
#include "qfe/errors.hpp"
#include "test_support.hpp"

using namespace qfe;

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

}  // namespace

TEST_CASE("build_table(0) solves the identity") {
  const auto g = GroupContext::setup();
  const auto t = DlogTable::build(g, 0);
  CHECK(t.baby_steps() == 1);
  CHECK(t.solve(GT()) == 0);
  CHECK(code_of([&] { t.solve(g.gt()); }) == ErrorCode::kOutOfRange);
}

TEST_CASE("baby-step count is ceil(sqrt(2B+1))") {
  CHECK(DlogTable::baby_steps_for(0) == 1);
  CHECK(DlogTable::baby_steps_for(1) == 2);    // 3 -> 2
  CHECK(DlogTable::baby_steps_for(4) == 3);    // 9 -> 3
  CHECK(DlogTable::baby_steps_for(5) == 4);    // 11 -> 4
  CHECK(DlogTable::baby_steps_for(1000000) == 1415);
  CHECK(DlogTable::baby_steps_for(4000000000000LL) == 2828428);
}

TEST_CASE("totality on small ranges, every z") {
  const auto g = GroupContext::setup();
  for (std::int64_t bound : {1, 2, 3, 4, 5, 7, 12, 40}) {
    const auto t = DlogTable::build(g, bound);
    GT cur = g.exp(g.gt(), -bound);
    for (std::int64_t z = -bound; z <= bound; ++z) {
      CHECK(t.solve(cur) == z);
      cur *= g.gt();
    }
    // cur is now gT^{bound+1}
    CHECK(code_of([&] { t.solve(cur); }) == ErrorCode::kOutOfRange);
    CHECK(code_of([&] { t.solve(g.exp(g.gt(), -bound - 1)); }) == ErrorCode::kOutOfRange);
  }
}

TEST_CASE("bound 10^6 examples") {
  const auto g = GroupContext::setup();
  const std::int64_t B = 1000000;
  const auto t = DlogTable::build(g, B);
  CHECK(t.solve(g.gt()) == 1);
  CHECK(t.solve(GT()) == 0);
  CHECK(t.solve(g.exp(g.gt(), -B)) == -B);
  CHECK(t.solve(g.exp(g.gt(), B)) == B);
  CHECK(code_of([&] { t.solve(g.exp(g.gt(), B + 1)); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([&] { t.solve(g.exp(g.gt(), -B - 1)); }) == ErrorCode::kOutOfRange);

  qfe::testing::Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    const std::int64_t z = gen.uniform(-B, B);
    CHECK(t.solve(g.exp(g.gt(), z)) == z);
  }
  // A random element of GT is out of range with overwhelming probability.
  SeededRandom rng(12);
  CHECK(code_of([&] { t.solve(g.exp(g.gt(), Scalar::random(rng))); }) ==
        ErrorCode::kOutOfRange);
}

TEST_CASE("window edges") {
  const auto g = GroupContext::setup();
  const std::int64_t B = 5000;
  const auto t = DlogTable::build(g, B);
  const auto m = static_cast<std::int64_t>(t.baby_steps());
  for (std::int64_t k = 0; k * m <= 2 * B; ++k)
    for (std::int64_t off : {-1, 0, 1}) {
      const std::int64_t z = k * m + off - B;
      if (z < -B || z > B) continue;
      CHECK(t.solve(g.exp(g.gt(), z)) == z);
    }
}

TEST_CASE("memory cap") {
  const auto g = GroupContext::setup();
  CHECK(DlogTable::estimated_bytes(1000000) >= 1415 * 12);
  CHECK(code_of([&] { DlogTable::build(g, 1000000, 1024); }) == ErrorCode::kCapacity);
  CHECK(code_of([&] { DlogTable::build(g, std::int64_t{1} << 60); }) == ErrorCode::kCapacity);
  CHECK(code_of([&] { DlogTable::build(g, -1); }) == ErrorCode::kInvalidArgument);

  ::setenv("QFE_DLOG_CAP_MB", "3", 1);
  CHECK(dlog_cap_from_env() == 3u << 20);
  ::setenv("QFE_DLOG_CAP_MB", "lots", 1);
  CHECK(code_of([] { dlog_cap_from_env(); }) == ErrorCode::kInvalidArgument);
  ::unsetenv("QFE_DLOG_CAP_MB");
  CHECK(dlog_cap_from_env() == kDefaultDlogCapBytes);
}

TEST_CASE("table key is a function of the encoding") {
  const auto g = GroupContext::setup();
  const GT a = g.exp(g.gt(), std::int64_t{42});
  const GT b = g.exp(g.gt(), std::int64_t{21}) * g.exp(g.gt(), std::int64_t{21});
  CHECK(gt_table_key(a) == gt_table_key(b));
  CHECK(gt_table_key(a) != gt_table_key(g.gt()));
}

TEST_CASE("persistence round-trip and rejection") {
  const auto g = GroupContext::setup();
  const auto t = DlogTable::build(g, 3000);
  std::stringstream buf;
  t.save(buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "QDLT");

  std::istringstream in(bytes);
  const auto back = DlogTable::load(in, g);
  CHECK(back.bound() == 3000);
  CHECK(back.baby_steps() == t.baby_steps());
  for (std::int64_t z : {-3000, -77, 0, 1, 2999, 3000})
    CHECK(back.solve(g.exp(g.gt(), z)) == z);

  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream in_bad(bad);
  CHECK(code_of([&] { DlogTable::load(in_bad, g); }) == ErrorCode::kBadMagic);

  std::string ver = bytes;
  ver[4] = 9;
  std::istringstream in_ver(ver);
  CHECK(code_of([&] { DlogTable::load(in_ver, g); }) == ErrorCode::kVersionMismatch);

  std::istringstream in_short(bytes.substr(0, bytes.size() - 5));
  CHECK(code_of([&] { DlogTable::load(in_short, g); }) == ErrorCode::kTruncated);

  std::istringstream in_tiny(bytes.substr(0, 2));
  CHECK(code_of([&] { DlogTable::load(in_tiny, g); }) == ErrorCode::kTruncated);
}

TEST_CASE("solve is safe to call concurrently") {
  const auto g = GroupContext::setup();
  const auto t = DlogTable::build(g, 20000);
  std::vector<GT> targets;
  for (std::int64_t z = -20000; z <= 20000; z += 997) targets.push_back(g.exp(g.gt(), z));
  std::vector<int> ok(4, 0);
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w)
    threads.emplace_back([&, w] {
      std::int64_t z = -20000;
      for (const auto& target : targets) {
        if (t.solve(target) == z) ++ok[w];
        z += 997;
      }
    });
  for (auto& th : threads) th.join();
  for (int v : ok) CHECK(v == static_cast<int>(targets.size()));
}
