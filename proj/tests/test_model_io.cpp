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

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qfe/errors.hpp"
#include "qfe/model_io.hpp"
#include "qfe/quadnet.hpp"
#include "test_support.hpp"

using namespace qfe;
using qfe::testing::Gen;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::kIo, "");
}

std::uint32_t read_u32(const Bytes& b, std::size_t at) {
  return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
         std::uint32_t(b[at + 3]) << 24;
}

std::string header_of(const Bytes& b) {
  return std::string(b.begin() + 12, b.begin() + 12 + read_u32(b, 8));
}

// Replaces the header text, fixing up its length field.
Bytes with_header(const Bytes& b, const std::function<std::string(std::string)>& edit) {
  const std::uint32_t len = read_u32(b, 8);
  const std::string h = edit(header_of(b));
  Bytes out(b.begin(), b.begin() + 8);
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(h.size() >> (8 * i)));
  out.insert(out.end(), h.begin(), h.end());
  out.insert(out.end(), b.begin() + 12 + len, b.end());
  return out;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

// Every proper prefix must fail cleanly with a coded error.
template <typename Decode>
void check_prefixes(const Bytes& bytes, Decode decode) {
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    const std::span<const std::uint8_t> prefix(bytes.data(), len);
    const Error e = error_of([&] { decode(prefix); });
    CHECK((e.code() == ErrorCode::kTruncated || e.code() == ErrorCode::kInvalidFormat));
  }
}

QuadModel sample_model() {
  Gen gen(1);
  QuadModel m = qfe::testing::random_model(gen, 6, 3, 4);
  m.quant.scale_p = 7.0 / 0.3;
  m.quant.scale_d = 3.5;
  m.quant.max_abs_p = 0.3;
  m.quant.max_abs_d = 2.0;
  return m;
}

struct Keys {
  GroupContext g = GroupContext::setup();
  SeededRandom rng{3};
  FunctionClass fc{3, 15, 15, 8};
  std::pair<PublicKey, MasterSecretKey> keys = setup(fc, g, rng);
};

}  // namespace

TEST_CASE("model round trip is canonical") {
  QuadModel m = sample_model();
  const Bytes bytes = encode_model(m);
  CHECK(std::memcmp(bytes.data(), "QFE1", 4) == 0);
  CHECK(read_u32(bytes, 4) == kFormatVersion);
  const QuadModel back = decode_model(bytes);
  CHECK(back == m);
  CHECK(encode_model(back) == bytes);

  const std::string h = header_of(bytes);
  CHECK(h.find("kind=model\n") != std::string::npos);
  CHECK(h.find("scale_p=23.333333333333336\n") != std::string::npos);
  CHECK(h.find("n=6\n") != std::string::npos);

  SUBCASE("with public head") {
    m.public_head = PublicHead{{4, 16, 10}, {0.5f, -1.25f, 3.0f}};
    const Bytes with_head = encode_model(m);
    CHECK(decode_model(with_head) == m);
    CHECK(encode_model(decode_model(with_head)) == with_head);
    check_prefixes(with_head, [](auto s) { decode_model(s); });
  }
}

TEST_CASE("model decode failures name the section") {
  const Bytes bytes = encode_model(sample_model());
  check_prefixes(bytes, [](auto s) { decode_model(s); });

  Bytes bad = bytes;
  bad[0] = 'X';
  Error e = error_of([&] { decode_model(bad); });
  CHECK(e.code() == ErrorCode::kBadMagic);

  bad = bytes;
  bad[4] = 2;
  e = error_of([&] { decode_model(bad); });
  CHECK(e.code() == ErrorCode::kVersionMismatch);
  CHECK(std::string(e.what()).find("version") != std::string::npos);

  e = error_of([&] { decode_model(Bytes(bytes.begin(), bytes.end() - 3)); });
  CHECK(e.code() == ErrorCode::kTruncated);
  CHECK(std::string(e.what()).find("tensor:diag") != std::string::npos);

  Bytes trailing = bytes;
  trailing.push_back(0);
  CHECK(error_of([&] { decode_model(trailing); }).code() == ErrorCode::kInvalidFormat);

  // A weight outside the 4-bit range, patched into the first P entry.
  const std::size_t p_start = 12 + read_u32(bytes, 8) + 8;
  bad = bytes;
  bad[p_start] = 9;
  bad[p_start + 1] = bad[p_start + 2] = bad[p_start + 3] = 0;
  e = error_of([&] { decode_model(bad); });
  CHECK(e.code() == ErrorCode::kInvalidFormat);
  CHECK(std::string(e.what()).find("invariants") != std::string::npos);

  const auto hdr = header_of(bytes);
  const auto sb_at = hdr.find("score_bound=");
  const auto sb_end = hdr.find('\n', sb_at);
  const std::string sb_line = hdr.substr(sb_at, sb_end - sb_at);
  e = error_of([&] {
    decode_model(with_header(bytes, [&](std::string s) { return replace(s, sb_line, "score_bound=1"); }));
  });
  CHECK(e.code() == ErrorCode::kInvalidFormat);
  CHECK(std::string(e.what()).find("score_bound") != std::string::npos);

  e = error_of([&] {
    decode_model(with_header(bytes, [](std::string s) { return s + "zzz=1\n"; }));
  });
  CHECK(e.code() == ErrorCode::kInvalidFormat);
  CHECK(std::string(e.what()).find("header") != std::string::npos);

  e = error_of([&] {
    decode_model(with_header(bytes, [](std::string s) { return replace(s, "n=6", "n=06"); }));
  });
  CHECK(e.code() == ErrorCode::kInvalidFormat);

  e = error_of([&] {
    decode_model(with_header(bytes, [](std::string s) { return replace(s, "kind=model", "kind=ct"); }));
  });
  CHECK(e.code() == ErrorCode::kInvalidFormat);
}

TEST_CASE("public key round trip") {
  Keys k;
  const auto& pk = k.keys.first;
  for (std::optional<int> bits : {std::optional<int>{}, std::optional<int>{4}}) {
    const Bytes bytes = encode_public_key(pk, bits);
    const auto back = decode_public_key(bytes, k.g);
    CHECK(back.input_bits == bits);
    CHECK(back.pk.g1_s == pk.g1_s);
    CHECK(back.pk.g2_t == pk.g2_t);
    CHECK(encode_public_key(back.pk, back.input_bits) == bytes);
    check_prefixes(bytes, [&](auto s) { decode_public_key(s, k.g); });
  }
  const Bytes bytes = encode_public_key(pk);
  const Error e = error_of([&] {
    decode_public_key(
        with_header(bytes, [](std::string s) { return replace(s, "BLS12-381", "BN254"); }), k.g);
  });
  CHECK(e.code() == ErrorCode::kCurveMismatch);

  // Flip a bit inside the first G1 element: decoding must refuse it.
  Bytes bad = bytes;
  bad[12 + read_u32(bytes, 8) + 4 + 4 + 20] ^= 0x40;
  CHECK_THROWS_AS(decode_public_key(bad, k.g), Error);
}

TEST_CASE("secret key round trip") {
  Keys k;
  const auto& msk = k.keys.second;
  const Bytes bytes = encode_secret_key(msk);
  const auto back = decode_secret_key(bytes, k.g);
  CHECK(back.s == msk.s);
  CHECK(back.t == msk.t);
  CHECK(encode_secret_key(back) == bytes);
  check_prefixes(bytes, [&](auto s) { decode_secret_key(s, k.g); });
  CHECK(error_of([&] { decode_public_key(bytes, k.g); }).code() == ErrorCode::kInvalidFormat);
}

TEST_CASE("functional key round trip") {
  Keys k;
  Gen gen(4);
  const FunctionalKey dk = keygen(k.g, k.keys.second, QuadraticForm(gen.matrix(3, 3, -8, 7)));
  for (std::optional<std::size_t> cls : {std::optional<std::size_t>{}, std::optional<std::size_t>{2}}) {
    const Bytes bytes = encode_functional_key(dk, cls);
    const auto back = decode_functional_key(bytes, k.g);
    CHECK(back.key.k == dk.k);
    CHECK(back.key.form == dk.form);
    CHECK(back.class_index == cls);
    CHECK(encode_functional_key(back.key, back.class_index) == bytes);
    check_prefixes(bytes, [&](auto s) { decode_functional_key(s, k.g); });
  }
}

TEST_CASE("ciphertext round trip") {
  Keys k;
  const std::vector<std::int64_t> x{1, 2, 3};
  const Ciphertext ct = encrypt(k.keys.first, x, x, k.fc, k.rng);
  const Bytes bytes = encode_ciphertext(ct);
  const Ciphertext back = decode_ciphertext(bytes, k.g);
  CHECK(back.c_gamma == ct.c_gamma);
  CHECK(back.a == ct.a);
  CHECK(back.b == ct.b);
  CHECK(encode_ciphertext(back) == bytes);
  check_prefixes(bytes, [&](auto s) { decode_ciphertext(s, k.g); });

  // The decoded ciphertext still decrypts.
  const auto table = DlogTable::build(k.g, 100);
  IntMatrix q(3, 3);
  q(2, 2) = 1;
  CHECK(decrypt(k.keys.first, back, keygen(k.g, k.keys.second, QuadraticForm(q)), table) == 9);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "qfe_model_io_test";
  std::filesystem::create_directories(dir);
  const QuadModel m = sample_model();
  save_model(dir / "m.qfe", m);
  CHECK(load_model(dir / "m.qfe") == m);
  CHECK(read_file(dir / "m.qfe") == encode_model(m));
  CHECK(error_of([&] { read_file(dir / "missing.qfe"); }).code() == ErrorCode::kIo);
  CHECK(error_of([&] { write_file(dir / "no" / "such" / "dir.qfe", Bytes{1}); }).code() ==
        ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}
