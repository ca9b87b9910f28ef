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

#ifndef QFE_MODEL_IO_HPP_
#define QFE_MODEL_IO_HPP_

// File formats shared by the toolkit and the training tooling.
//
// Every file is
//
//   "QFE1"                magic, 4 bytes
//   u32 version           currently 1
//   u32 header_len
//   header                header_len bytes of "key=value\n" lines, keys
//                         sorted and unique; always contains kind=...
//   body                  sections in a fixed order per kind
//
// Body sections (all integers little-endian):
//   i32 / i64 tensor      u64 count, then count fixed-width values
//   f32 tensor            u64 count, then count IEEE-754 binary32 values
//   element list          u32 count, then count x (u32 length, bytes)
//
// kind=model  header: bits classes d input_bits max_abs_d max_abs_p n
//                     scale_d scale_p score_bound [public_head_layers]
//             body:   i32 P (d x (n+1)), i32 diag (classes x d),
//                     [f32 public head weights]
// kind=pk     header: curve n [input_bits]     body: list g1_s, list g2_t
// kind=msk    header: curve n                  body: list s, list t
// kind=dk     header: curve dim [class]        body: list [k], i64 form
// kind=ct     header: curve n                  body: list [c_gamma], list a
//                                              (2n), list b (2n)
//
// Group elements use the compressed BLS12-381 encodings, scalars 32 bytes
// big-endian. Real numbers in headers are printed with "%.17g". Encoding is
// canonical: decode followed by encode reproduces the input bytes.
//
// Secret key files are written in the clear; protecting them is up to the
// caller.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "qfe/group.hpp"
#include "qfe/model.hpp"
#include "qfe/scheme.hpp"

namespace qfe {

inline constexpr std::uint32_t kFormatVersion = 1;

using Bytes = std::vector<std::uint8_t>;

Bytes encode_model(const QuadModel& model);
// Also rejects weights outside the declared bit width and a stored score
// bound below the one implied by the weights.
QuadModel decode_model(std::span<const std::uint8_t> bytes);

struct PublicKeyFile {
  PublicKey pk;
  std::optional<int> input_bits;  // quantization the key holder expects
};

Bytes encode_public_key(const PublicKey& pk, std::optional<int> input_bits = std::nullopt);
PublicKeyFile decode_public_key(std::span<const std::uint8_t> bytes, const GroupContext& group);

Bytes encode_secret_key(const MasterSecretKey& msk);
MasterSecretKey decode_secret_key(std::span<const std::uint8_t> bytes, const GroupContext& group);

struct FunctionalKeyFile {
  FunctionalKey key;
  std::optional<std::size_t> class_index;
};

Bytes encode_functional_key(const FunctionalKey& dk,
                            std::optional<std::size_t> class_index = std::nullopt);
FunctionalKeyFile decode_functional_key(std::span<const std::uint8_t> bytes,
                                        const GroupContext& group);

Bytes encode_ciphertext(const Ciphertext& ct);
Ciphertext decode_ciphertext(std::span<const std::uint8_t> bytes, const GroupContext& group);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline void save_model(const std::filesystem::path& p, const QuadModel& m) {
  write_file(p, encode_model(m));
}
inline QuadModel load_model(const std::filesystem::path& p) { return decode_model(read_file(p)); }

inline void save_ct(const std::filesystem::path& p, const Ciphertext& ct) {
  write_file(p, encode_ciphertext(ct));
}
inline Ciphertext load_ct(const std::filesystem::path& p, const GroupContext& g) {
  return decode_ciphertext(read_file(p), g);
}

}  // namespace qfe

#endif  // QFE_MODEL_IO_HPP_
