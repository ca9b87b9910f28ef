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

#include "qfe/quantizer.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <string>

#include "qfe/errors.hpp"

namespace qfe {

QuantizedTensor quantize_tensor(std::span<const double> weights, int bits) {
  if (bits < 2 || bits > 16) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantize: bits must be in [2, 16], got " + std::to_string(bits));
  }
  QuantizedTensor out;
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "quantize: non-finite weight");
    out.max_abs = std::max(out.max_abs, std::fabs(w));
  }
  const std::int64_t qmax = (std::int64_t{1} << (bits - 1)) - 1;
  out.scale = out.max_abs > 0.0 ? double(qmax) / out.max_abs : 1.0;

  // nearbyint honours the current rounding mode; pin it to ties-to-even.
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  out.values.reserve(weights.size());
  for (double w : weights) {
    auto q = static_cast<std::int64_t>(std::nearbyint(w * out.scale));
    out.values.push_back(std::clamp(q, -qmax - 1, qmax));
  }
  std::fesetround(saved);
  return out;
}

QuantizedModel quantize_model(std::span<const double> projection_real, std::size_t rows,
                              std::size_t cols,
                              const std::vector<std::vector<double>>& diag_real, int bits,
                              int input_bits) {
  if (projection_real.size() != rows * cols) {
    throw Error(ErrorCode::kDimensionMismatch, "quantize: projection size mismatch");
  }
  std::vector<double> flat_d;
  for (const auto& row : diag_real) {
    if (row.size() != rows) {
      throw Error(ErrorCode::kDimensionMismatch, "quantize: diagonal length differs from d");
    }
    flat_d.insert(flat_d.end(), row.begin(), row.end());
  }
  QuantizedTensor qp = quantize_tensor(projection_real, bits);
  QuantizedTensor qd = quantize_tensor(flat_d, bits);

  QuantizedModel out;
  out.projection = IntMatrix(rows, cols, std::move(qp.values));
  for (std::size_t c = 0; c < diag_real.size(); ++c) {
    out.diag.emplace_back(qd.values.begin() + std::ptrdiff_t(c * rows),
                          qd.values.begin() + std::ptrdiff_t((c + 1) * rows));
  }
  out.meta.bits = bits;
  out.meta.input_bits = input_bits;
  out.meta.scale_p = qp.scale;
  out.meta.scale_d = qd.scale;
  out.meta.max_abs_p = qp.max_abs;
  out.meta.max_abs_d = qd.max_abs;
  return out;
}

std::vector<std::int64_t> quantize_input(std::span<const std::int64_t> pixels, int input_bits) {
  if (input_bits < 1 || input_bits > 8) {
    throw Error(ErrorCode::kInvalidArgument, "quantize_input: input_bits must be in [1, 8]");
  }
  std::vector<std::int64_t> out;
  out.reserve(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (pixels[i] < 0 || pixels[i] > 255) {
      throw Error(ErrorCode::kOutOfBound, "quantize_input: pixel " + std::to_string(i) +
                                              " = " + std::to_string(pixels[i]) +
                                              " outside [0, 255]");
    }
    out.push_back(pixels[i] >> (8 - input_bits));
  }
  return out;
}

BigInt score_bound(const QuadModel& model, std::int64_t input_max) {
  const IntMatrix& p = model.projection;
  std::vector<BigInt> hidden_sq(p.rows());
  for (std::size_t k = 0; k < p.rows(); ++k) {
    BigInt acc = 0;
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const long xmax = j == 0 ? 1 : static_cast<long>(input_max);
      acc += BigInt(static_cast<long>(std::abs(p(k, j)))) * xmax;
    }
    hidden_sq[k] = acc * acc;
  }
  BigInt best = 0;
  for (const auto& row : model.diag) {
    BigInt total = 0;
    for (std::size_t k = 0; k < row.size() && k < hidden_sq.size(); ++k) {
      total += BigInt(static_cast<long>(std::abs(row[k]))) * hidden_sq[k];
    }
    if (total > best) best = total;
  }
  return best;
}

}  // namespace qfe
