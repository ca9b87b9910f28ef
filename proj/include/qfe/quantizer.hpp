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

#ifndef QFE_QUANTIZER_HPP_
#define QFE_QUANTIZER_HPP_

// Symmetric per-tensor quantization:
//   scale = (2^(bits-1) - 1) / max|w|,  q = round_half_even(w * scale)
// An all-zero tensor gets scale 1.

#include <cstdint>
#include <span>
#include <vector>

#include "qfe/group.hpp"
#include "qfe/model.hpp"

namespace qfe {

struct QuantizedTensor {
  std::vector<std::int64_t> values;
  double scale = 1.0;
  double max_abs = 0.0;
};

QuantizedTensor quantize_tensor(std::span<const double> weights, int bits);

struct QuantizedModel {
  IntMatrix projection;
  std::vector<std::vector<std::int64_t>> diag;
  QuantMeta meta;
};

// projection_real is d x (n+1) row-major; diag_real is classes x d.
QuantizedModel quantize_model(std::span<const double> projection_real, std::size_t rows,
                              std::size_t cols,
                              const std::vector<std::vector<double>>& diag_real, int bits,
                              int input_bits = 4);

// 8-bit pixels to input_bits levels by right shift (255 -> 15 at 4 bits).
std::vector<std::int64_t> quantize_input(std::span<const std::int64_t> pixels, int input_bits);

// max_i sum_k |D_ik| * (sum_j |P_kj| * xmax_j)^2 with xmax_0 = 1 (bias) and
// xmax_j = input_max otherwise. Never below any reachable |q_i(x)|.
BigInt score_bound(const QuadModel& model, std::int64_t input_max);

}  // namespace qfe

#endif  // QFE_QUANTIZER_HPP_
