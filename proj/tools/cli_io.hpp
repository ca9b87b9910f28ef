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

#ifndef QFE_TOOLS_CLI_IO_HPP_
#define QFE_TOOLS_CLI_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qfe/errors.hpp"

namespace qfe::cli {

// Process exit codes. One per failure category.
enum Exit : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitFormat = 4,    // bad magic, version, truncated or malformed file
  kExitCurve = 5,     // artifact made for another curve
  kExitCapacity = 6,  // score bound too large for the dlog memory cap
  kExitRange = 7,     // dlog failed: result outside the table bound
  kExitInput = 8,     // inconsistent artifacts or out-of-range values
};

int exit_code_for(ErrorCode code);

// error: code=<name> exit=<n> msg="<text>"
std::string diagnostic(std::string_view code_name, int exit_code, std::string_view message);

// Grayscale pixels 0..255 from binary PGM (P5, maxval <= 255) or a flat JSON
// array. The format is detected from the first bytes.
std::vector<std::int64_t> read_image(const std::filesystem::path& path);
std::vector<std::int64_t> parse_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::int64_t> parse_json_pixels(std::span<const std::uint8_t> bytes);

}  // namespace qfe::cli

#endif  // QFE_TOOLS_CLI_IO_HPP_
