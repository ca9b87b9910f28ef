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

#ifndef QFE_TESTS_TEST_SUPPORT_HPP_
#define QFE_TESTS_TEST_SUPPORT_HPP_

// Independent oracles for the tests: plain big-integer arithmetic, never the
// Z_p or group code paths under test.

#include <cstdint>
#include <random>
#include <vector>

#include "qfe/group.hpp"
#include "qfe/matrix.hpp"
#include "qfe/model.hpp"
#include "qfe/quantizer.hpp"
#include "qfe/scheme.hpp"

namespace qfe::testing {

inline BigInt mod_p(const BigInt& v) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), group_order().get_mpz_t());
  return r;
}

inline BigInt big(std::int64_t v) { return BigInt(static_cast<long>(v)); }

// sum_ij q_ij x_i y_j over Z.
inline BigInt plain_form(const IntMatrix& q, const std::vector<std::int64_t>& x,
                         const std::vector<std::int64_t>& y) {
  BigInt acc = 0;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) acc += big(q(i, j)) * big(x[i]) * big(y[j]);
  return acc;
}

// sum_ij q_ij s_i t_j mod p with s, t lifted to integers.
inline BigInt exponent_form(const IntMatrix& q, const std::vector<Scalar>& s,
                            const std::vector<Scalar>& t) {
  BigInt acc = 0;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j)
      acc += big(q(i, j)) * s[i].to_bigint() * t[j].to_bigint();
  return mod_p(acc);
}

// M v over Z.
inline std::vector<BigInt> apply_big(const IntMatrix& m, const std::vector<BigInt>& v) {
  std::vector<BigInt> out(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r] += big(m(r, c)) * v[c];
  return out;
}

inline std::vector<BigInt> lift(const std::vector<std::int64_t>& v) {
  std::vector<BigInt> out;
  for (auto x : v) out.push_back(big(x));
  return out;
}

inline std::vector<BigInt> lift(const std::vector<Scalar>& v) {
  std::vector<BigInt> out;
  for (const auto& x : v) out.push_back(x.to_bigint());
  return out;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
  }
  std::vector<std::int64_t> vec(std::size_t n, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> out(n);
    for (auto& v : out) v = uniform(lo, hi);
    return out;
  }
  IntMatrix matrix(std::size_t r, std::size_t c, std::int64_t lo, std::int64_t hi) {
    return IntMatrix(r, c, vec(r * c, lo, hi));
  }
  // Dense: no zero entries.
  IntMatrix dense_matrix(std::size_t r, std::size_t c, std::int64_t bound) {
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        std::int64_t v = 0;
        while (v == 0) v = uniform(-bound, bound);
        m(i, j) = v;
      }
    return m;
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Random quantized model with the given shape; every weight fits `bits`.
inline QuadModel random_model(Gen& gen, std::size_t n, std::size_t d, std::size_t classes,
                              int bits = 4, double density = 1.0) {
  QuadModel m;
  m.n = n;
  m.quant.bits = bits;
  m.quant.input_bits = 4;
  const std::int64_t lo = -(std::int64_t{1} << (bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;
  m.projection = IntMatrix(d, n + 1);
  std::bernoulli_distribution keep(density);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j <= n; ++j)
      if (keep(gen.engine())) m.projection(k, j) = gen.uniform(lo, hi);
  for (std::size_t c = 0; c < classes; ++c) m.diag.push_back(gen.vec(d, lo, hi));
  m.score_bound = score_bound(m, m.quant.input_max()).get_si();
  return m;
}

}  // namespace qfe::testing

#endif  // QFE_TESTS_TEST_SUPPORT_HPP_
