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

#ifndef QFE_MODEL_HPP_
#define QFE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qfe/matrix.hpp"

namespace qfe {

// How real weights and pixels were mapped to integers.
struct QuantMeta {
  int bits = 4;        // signed weight width
  int input_bits = 4;  // unsigned input width
  double scale_p = 1.0;  // integer = round(real * scale)
  double scale_d = 1.0;
  double max_abs_p = 0.0;  // real-valued range before quantization
  double max_abs_d = 0.0;

  std::int64_t weight_min() const { return -(std::int64_t{1} << (bits - 1)); }
  std::int64_t weight_max() const { return (std::int64_t{1} << (bits - 1)) - 1; }
  std::int64_t input_max() const { return (std::int64_t{1} << input_bits) - 1; }

  bool operator==(const QuantMeta&) const = default;
};

// Plaintext layers stacked on the decrypted scores. Carried through model
// files untouched; evaluated by the training tooling, not here.
struct PublicHead {
  std::vector<std::uint32_t> layers;
  std::vector<float> weights;

  bool operator==(const PublicHead&) const = default;
};

// Private quadratic network q_i(x) = (P x')^T D_i (P x'), x' = (1, x).
struct QuadModel {
  std::size_t n = 0;       // input length, without the bias slot
  IntMatrix projection;    // d x (n + 1); column 0 multiplies the bias 1
  std::vector<std::vector<std::int64_t>> diag;  // classes x d
  QuantMeta quant;
  std::int64_t score_bound = 0;  // >= |q_i(x)| for every in-range x
  std::optional<PublicHead> public_head;

  std::size_t hidden() const { return projection.rows(); }
  std::size_t classes() const { return diag.size(); }
  std::size_t augmented_dim() const { return n + 1; }

  // Shapes, d >= 1, classes >= 1, weights inside the quantized range.
  // Throws kDimensionMismatch or kOutOfBound.
  void validate() const;

  bool operator==(const QuadModel&) const = default;
};

}  // namespace qfe

#endif  // QFE_MODEL_HPP_
