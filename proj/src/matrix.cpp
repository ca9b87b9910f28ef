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

#include "qfe/matrix.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "qfe/errors.hpp"

namespace qfe {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix: " + std::to_string(data_.size()) + " values for " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::int64_t IntMatrix::max_abs() const {
  std::int64_t best = 0;
  for (auto v : data_) best = std::max(best, std::abs(v));
  return best;
}

std::size_t IntMatrix::nonzeros() const {
  return std::size_t(std::count_if(data_.begin(), data_.end(),
                                   [](std::int64_t v) { return v != 0; }));
}

}  // namespace qfe
