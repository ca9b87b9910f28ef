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

#include "qfe/model.hpp"

#include <string>

#include "qfe/errors.hpp"

namespace qfe {

void QuadModel::validate() const {
  if (quant.bits < 2 || quant.bits > 16 || quant.input_bits < 1 || quant.input_bits > 8) {
    throw Error(ErrorCode::kInvalidArgument, "model: unsupported bit widths");
  }
  if (projection.rows() == 0 || diag.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "model: need d >= 1 and at least one class");
  }
  if (projection.cols() != n + 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model: projection has " + std::to_string(projection.cols()) +
                    " columns, expected n + 1 = " + std::to_string(n + 1));
  }
  for (std::size_t c = 0; c < diag.size(); ++c) {
    if (diag[c].size() != projection.rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "model: diagonal " + std::to_string(c) + " has wrong length");
    }
  }
  const auto in_range = [this](std::int64_t w) {
    return w >= quant.weight_min() && w <= quant.weight_max();
  };
  for (auto w : projection.values()) {
    if (!in_range(w)) {
      throw Error(ErrorCode::kOutOfBound,
                  "model: projection weight " + std::to_string(w) + " outside " +
                      std::to_string(quant.bits) + "-bit range");
    }
  }
  for (const auto& row : diag) {
    for (auto w : row) {
      if (!in_range(w)) {
        throw Error(ErrorCode::kOutOfBound,
                    "model: diagonal weight " + std::to_string(w) + " outside " +
                        std::to_string(quant.bits) + "-bit range");
      }
    }
  }
  if (score_bound < 0) throw Error(ErrorCode::kOutOfBound, "model: negative score bound");
}

}  // namespace qfe
