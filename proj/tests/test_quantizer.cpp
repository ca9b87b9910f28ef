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

#include <algorithm>
#include <cmath>
#include <vector>

#include "qfe/errors.hpp"
#include "qfe/quadnet.hpp"
#include "qfe/quantizer.hpp"
#include "test_support.hpp"

using namespace qfe;
using qfe::testing::Gen;

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

TEST_CASE("quantize_tensor scale arithmetic") {
  const std::vector<double> w{1.0, -0.5, 0.25, 0.0};
  const auto q = quantize_tensor(w, 4);
  CHECK(q.scale == 7.0);
  CHECK(q.max_abs == 1.0);
  CHECK(q.values == std::vector<std::int64_t>{7, -4, 2, 0});  // -3.5 -> -4, 1.75 -> 2
}

TEST_CASE("ties round to even") {
  // max|w| = 7 at 4 bits gives scale 1.
  const std::vector<double> w{0.5, 1.5, 2.5, -0.5, -1.5, -2.5, 7.0};
  CHECK(quantize_tensor(w, 4).values == std::vector<std::int64_t>{0, 2, 2, 0, -2, -2, 7});
}

TEST_CASE("integer weights in range are left alone") {
  const std::vector<double> w{-100, 3, 0, 17, 255};
  const auto q = quantize_tensor(w, 9);  // qmax 255
  CHECK(q.scale == 1.0);
  CHECK(q.values == std::vector<std::int64_t>{-100, 3, 0, 17, 255});
}

TEST_CASE("all-zero tensor gets scale 1") {
  const std::vector<double> w(5, 0.0);
  const auto q = quantize_tensor(w, 4);
  CHECK(q.scale == 1.0);
  CHECK(q.values == std::vector<std::int64_t>(5, 0));
  CHECK(quantize_tensor({}, 4).values.empty());
}

TEST_CASE("dequantization error is at most half a step") {
  Gen gen(1);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int bits : {2, 3, 4, 8, 16}) {
    std::vector<double> w(500);
    for (auto& v : w) v = dist(gen.engine());
    const auto q = quantize_tensor(w, bits);
    const std::int64_t qmax = (std::int64_t{1} << (bits - 1)) - 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(std::fabs(double(q.values[i]) / q.scale - w[i]) <= 0.5 / q.scale + 1e-12);
      CHECK(q.values[i] >= -qmax - 1);
      CHECK(q.values[i] <= qmax);
    }
  }
}

TEST_CASE("quantize_tensor rejects bad input") {
  const std::vector<double> w{1.0};
  CHECK(code_of([&] { quantize_tensor(w, 1); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { quantize_tensor(w, 17); }) == ErrorCode::kInvalidArgument);
  const std::vector<double> nan{std::nan("")};
  CHECK(code_of([&] { quantize_tensor(nan, 4); }) == ErrorCode::kInvalidArgument);
  const std::vector<double> inf{INFINITY};
  CHECK(code_of([&] { quantize_tensor(inf, 4); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("quantize_model splits tensors per role") {
  const std::vector<double> p{0.5, -1.0, 0.0, 0.25, 0.75, -0.5};  // 2 x 3
  const std::vector<std::vector<double>> d{{2.0, -1.0}, {0.5, 0.0}, {-2.0, 1.0}};
  const auto m = quantize_model(p, 2, 3, d, 4, 4);
  CHECK(m.projection == IntMatrix(2, 3, {4, -7, 0, 2, 5, -4}));  // 3.5 -> 4, 1.75 -> 2, 5.25 -> 5
  CHECK(m.diag == std::vector<std::vector<std::int64_t>>{{7, -4}, {2, 0}, {-7, 4}});
  CHECK(m.meta.scale_p == 7.0);
  CHECK(m.meta.scale_d == 3.5);
  CHECK(m.meta.max_abs_d == 2.0);
  CHECK(m.meta.bits == 4);
  CHECK(code_of([&] { quantize_model(p, 3, 3, d, 4); }) == ErrorCode::kDimensionMismatch);
  const std::vector<std::vector<double>> bad{{1.0, 2.0, 3.0}};
  CHECK(code_of([&] { quantize_model(p, 2, 3, bad, 4); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("quantize_input") {
  const std::vector<std::int64_t> px{0, 15, 16, 128, 254, 255};
  CHECK(quantize_input(px, 4) == std::vector<std::int64_t>{0, 0, 1, 8, 15, 15});
  CHECK(quantize_input(px, 8) == px);
  CHECK(quantize_input(px, 1) == std::vector<std::int64_t>{0, 0, 0, 1, 1, 1});

  std::vector<std::int64_t> all(256);
  for (int i = 0; i < 256; ++i) all[i] = i;
  for (int bits = 1; bits <= 8; ++bits) {
    const auto q = quantize_input(all, bits);
    CHECK(std::is_sorted(q.begin(), q.end()));
    CHECK(q.front() == 0);
    CHECK(q.back() == (1 << bits) - 1);
  }
  const std::vector<std::int64_t> hi{256}, lo{-1};
  CHECK(code_of([&] { quantize_input(hi, 4); }) == ErrorCode::kOutOfBound);
  CHECK(code_of([&] { quantize_input(lo, 4); }) == ErrorCode::kOutOfBound);
  CHECK(code_of([&] { quantize_input(px, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("score_bound closed forms") {
  QuadModel zero;
  zero.n = 3;
  zero.projection = IntMatrix(2, 4);
  zero.diag = {{0, 0}};
  CHECK(score_bound(zero, 15) == 0);

  QuadModel m;
  m.n = 1;
  m.projection = IntMatrix(1, 2, {1, 1});
  m.diag = {{1}};
  CHECK(score_bound(m, 15) == 256);

  // Class maximum, negative entries count by magnitude.
  m.diag = {{1}, {-3}, {2}};
  CHECK(score_bound(m, 15) == 3 * 256);
}

TEST_CASE("score_bound dominates exhaustive enumeration") {
  Gen gen(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.uniform(1, 3));
    const std::size_t d = static_cast<std::size_t>(gen.uniform(1, 3));
    QuadModel m = qfe::testing::random_model(gen, n, d, 3, 4, 0.8);
    m.quant.input_bits = 2;  // x in [0, 3]
    const std::int64_t xmax = m.quant.input_max();
    const BigInt bound = score_bound(m, xmax);
    BigInt worst = 0;
    std::vector<std::int64_t> x(n, 0);
    while (true) {
      for (const auto& z : infer_plaintext_oracle(m, x)) worst = std::max(worst, BigInt(abs(z)));
      std::size_t i = 0;
      while (i < n && x[i] == xmax) x[i++] = 0;
      if (i == n) break;
      ++x[i];
    }
    CHECK(bound >= worst);
  }
}
