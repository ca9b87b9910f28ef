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

#include "cli_io.hpp"

#include <cctype>
#include <json.hpp>

#include "qfe/model_io.hpp"

namespace qfe::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kBadMagic:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kTruncated:
    case ErrorCode::kInvalidFormat:
    case ErrorCode::kBadEncoding:
      return kExitFormat;
    case ErrorCode::kCurveMismatch:
      return kExitCurve;
    case ErrorCode::kCapacity:
      return kExitCapacity;
    case ErrorCode::kOutOfRange:
      return kExitRange;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kOutOfBound:
    case ErrorCode::kUnsupported:
      return kExitInput;
  }
  return kExitInternal;
}

std::string diagnostic(std::string_view code_name, int exit_code, std::string_view message) {
  std::string msg;
  for (char c : message) {
    if (c == '"' || c == '\\') msg += '\\';
    msg += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return "error: code=" + std::string(code_name) + " exit=" + std::to_string(exit_code) +
         " msg=\"" + msg + "\"";
}

namespace {

[[noreturn]] void bad_image(const std::string& what) {
  throw Error(ErrorCode::kInvalidFormat, "image: " + what);
}

}  // namespace

std::vector<std::int64_t> parse_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  // Whitespace and '#' comments between header fields.
  auto next_field = [&]() -> std::uint64_t {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) bad_image("malformed PGM header");
    std::uint64_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1u << 24)) bad_image("PGM dimension too large");
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') bad_image("not a binary PGM");
  const std::uint64_t width = next_field();
  const std::uint64_t height = next_field();
  const std::uint64_t maxval = next_field();
  if (maxval == 0 || maxval > 255) bad_image("only 8-bit PGM is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) bad_image("malformed PGM header");
  ++pos;
  const std::uint64_t count = width * height;
  if (bytes.size() - pos != count) {
    throw Error(ErrorCode::kTruncated, "image: expected " + std::to_string(count) +
                                           " pixels, found " + std::to_string(bytes.size() - pos));
  }
  std::vector<std::int64_t> out(bytes.begin() + std::ptrdiff_t(pos), bytes.end());
  if (maxval != 255) {
    for (auto& v : out) {
      if (std::uint64_t(v) > maxval) bad_image("pixel above maxval");
      v = (v * 255 + std::int64_t(maxval) / 2) / std::int64_t(maxval);
    }
  }
  return out;
}

std::vector<std::int64_t> parse_json_pixels(std::span<const std::uint8_t> bytes) {
  const auto doc = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) bad_image("expected a JSON array of integers");
  std::vector<std::int64_t> out;
  out.reserve(doc.size());
  for (const auto& v : doc) {
    if (!v.is_number_integer()) bad_image("expected a JSON array of integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

std::vector<std::int64_t> read_image(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return parse_pgm(bytes);
  return parse_json_pixels(bytes);
}

}  // namespace qfe::cli
