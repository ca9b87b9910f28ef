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

#ifndef QFE_ERRORS_HPP_
#define QFE_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfe {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kOutOfBound,      // plaintext or weight outside its declared bound
  kOutOfRange,      // discrete log not found within the table bound
  kUnsupported,
  kBadEncoding,     // malformed group element or scalar bytes
  kBadMagic,
  kVersionMismatch,
  kCurveMismatch,
  kTruncated,
  kInvalidFormat,   // well-formed bytes violating a file invariant
  kCapacity,        // dlog table would exceed the memory cap
  kIo,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qfe

#endif  // QFE_ERRORS_HPP_
