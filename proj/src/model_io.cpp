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

#include "qfe/model_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "qfe/errors.hpp"
#include "qfe/quantizer.hpp"

namespace qfe {
namespace {

constexpr char kMagic[4] = {'Q', 'F', 'E', '1'};

using Header = std::map<std::string, std::string>;

class Writer {
 public:
  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  template <typename T>
  void le(T v) {
    const auto u = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(std::uint8_t(u >> (8 * i)));
  }

  void header(const Header& h) {
    std::string text;
    for (const auto& [k, v] : h) text += k + "=" + v + "\n";
    raw({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
    le<std::uint32_t>(kFormatVersion);
    le<std::uint32_t>(std::uint32_t(text.size()));
    raw({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  }

  template <typename T>
  void int_tensor(std::span<const std::int64_t> values) {
    le<std::uint64_t>(values.size());
    for (auto v : values) le<T>(static_cast<T>(v));
  }

  void f32_tensor(std::span<const float> values) {
    le<std::uint64_t>(values.size());
    for (float v : values) le<std::uint32_t>(std::bit_cast<std::uint32_t>(v));
  }

  template <typename Range>
  void element_list(const Range& encodings) {
    le<std::uint32_t>(std::uint32_t(encodings.size()));
    for (const auto& e : encodings) {
      le<std::uint32_t>(std::uint32_t(e.size()));
      raw(e);
    }
  }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void section(std::string name) { section_ = std::move(name); }

  [[noreturn]] void fail(ErrorCode code, const std::string& what) const {
    throw Error(code, "section '" + section_ + "': " + what);
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (in_.size() - pos_ < n) {
      fail(ErrorCode::kTruncated, "truncated payload (need " + std::to_string(n) +
                                      " bytes, " + std::to_string(in_.size() - pos_) +
                                      " left)");
    }
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T le() {
    auto b = take(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return static_cast<T>(v);
  }

  template <typename T>
  std::vector<std::int64_t> int_tensor(std::uint64_t expected) {
    const auto count = le<std::uint64_t>();
    if (count != expected) {
      fail(ErrorCode::kInvalidFormat, "expected " + std::to_string(expected) + " values, found " +
                                          std::to_string(count));
    }
    if ((in_.size() - pos_) / sizeof(T) < count) fail(ErrorCode::kTruncated, "truncated payload");
    std::vector<std::int64_t> out(count);
    for (auto& v : out) v = static_cast<std::int64_t>(le<std::make_signed_t<T>>());
    return out;
  }

  std::vector<float> f32_tensor() {
    const auto count = le<std::uint64_t>();
    if ((in_.size() - pos_) / 4 < count) fail(ErrorCode::kTruncated, "truncated payload");
    std::vector<float> out(count);
    for (auto& v : out) v = std::bit_cast<float>(le<std::uint32_t>());
    return out;
  }

  std::vector<std::span<const std::uint8_t>> element_list(std::size_t expected, std::size_t width) {
    const auto count = le<std::uint32_t>();
    if (count != expected) {
      fail(ErrorCode::kInvalidFormat, "expected " + std::to_string(expected) +
                                          " elements, found " + std::to_string(count));
    }
    std::vector<std::span<const std::uint8_t>> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto len = le<std::uint32_t>();
      if (len != width) {
        fail(ErrorCode::kInvalidFormat, "element " + std::to_string(i) + " has length " +
                                            std::to_string(len) + ", expected " +
                                            std::to_string(width));
      }
      out.push_back(take(len));
    }
    return out;
  }

  template <typename T>
  std::vector<T> decode_list(std::size_t expected, std::size_t width) {
    std::vector<T> out;
    out.reserve(expected);
    std::size_t i = 0;
    for (auto bytes : element_list(expected, width)) {
      try {
        out.push_back(T::decode(bytes));
      } catch (const Error& e) {
        fail(e.code(), "element " + std::to_string(i) + ": " + e.what());
      }
      ++i;
    }
    return out;
  }

  void finish() {
    section_ = "trailer";
    if (pos_ != in_.size()) {
      fail(ErrorCode::kInvalidFormat, std::to_string(in_.size() - pos_) + " trailing bytes");
    }
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::string section_ = "magic";
};

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_layers(const std::vector<std::uint32_t>& layers) {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(layers[i]);
  }
  return out;
}

Header read_header(Reader& r, std::string_view kind) {
  r.section("magic");
  auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) r.fail(ErrorCode::kBadMagic, "bad magic");
  r.section("version");
  const auto version = r.le<std::uint32_t>();
  if (version != kFormatVersion) {
    r.fail(ErrorCode::kVersionMismatch, "format version " + std::to_string(version) +
                                            ", supported " + std::to_string(kFormatVersion));
  }
  r.section("header");
  const auto len = r.le<std::uint32_t>();
  auto raw = r.take(len);
  const std::string_view text(reinterpret_cast<const char*>(raw.data()), raw.size());

  Header h;
  std::string previous;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) r.fail(ErrorCode::kInvalidFormat, "unterminated line");
    const auto line = text.substr(pos, nl - pos);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      r.fail(ErrorCode::kInvalidFormat, "malformed line '" + std::string(line) + "'");
    }
    std::string key(line.substr(0, eq));
    if (!h.empty() && key <= previous) {
      r.fail(ErrorCode::kInvalidFormat, "keys not sorted and unique at '" + key + "'");
    }
    previous = key;
    h.emplace(std::move(key), std::string(line.substr(eq + 1)));
    pos = nl + 1;
  }
  const auto it = h.find("kind");
  if (it == h.end() || it->second != kind) {
    r.fail(ErrorCode::kInvalidFormat,
           "expected kind=" + std::string(kind) +
               (it == h.end() ? std::string(", none given") : ", found " + it->second));
  }
  return h;
}

const std::string& require(Reader& r, const Header& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) r.fail(ErrorCode::kInvalidFormat, "missing key '" + key + "'");
  return it->second;
}

std::int64_t header_int(Reader& r, const Header& h, const std::string& key, std::int64_t lo,
                        std::int64_t hi) {
  const std::string& s = require(r, h, key);
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || std::to_string(v) != s) {
    r.fail(ErrorCode::kInvalidFormat, "key '" + key + "' is not a canonical integer");
  }
  if (v < lo || v > hi) r.fail(ErrorCode::kInvalidFormat, "key '" + key + "' out of range");
  return v;
}

double header_real(Reader& r, const Header& h, const std::string& key) {
  const std::string& s = require(r, h, key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || format_real(v) != s) {
    r.fail(ErrorCode::kInvalidFormat, "key '" + key + "' is not a canonical real");
  }
  return v;
}

void check_curve(Reader& r, const Header& h, const GroupContext& group) {
  const std::string& curve = require(r, h, "curve");
  if (curve != group.curve_id()) {
    r.fail(ErrorCode::kCurveMismatch,
           "file is for curve " + curve + ", runtime uses " + std::string(group.curve_id()));
  }
}

void check_keys_known(Reader& r, const Header& h, std::initializer_list<std::string_view> known) {
  for (const auto& [k, v] : h) {
    bool ok = false;
    for (auto name : known) ok = ok || k == name;
    if (!ok) r.fail(ErrorCode::kInvalidFormat, "unknown key '" + k + "'");
  }
}

template <typename T>
std::vector<std::array<std::uint8_t, sizeof(std::declval<T>().encode())>> encodings(
    const std::vector<T>& xs) {
  std::vector<std::array<std::uint8_t, sizeof(std::declval<T>().encode())>> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.encode());
  return out;
}

constexpr std::int64_t kMaxDim = std::int64_t{1} << 24;

}  // namespace

// ---- model ----------------------------------------------------------------

Bytes encode_model(const QuadModel& model) {
  model.validate();
  Header h{{"bits", std::to_string(model.quant.bits)},
           {"classes", std::to_string(model.classes())},
           {"d", std::to_string(model.hidden())},
           {"input_bits", std::to_string(model.quant.input_bits)},
           {"kind", "model"},
           {"max_abs_d", format_real(model.quant.max_abs_d)},
           {"max_abs_p", format_real(model.quant.max_abs_p)},
           {"n", std::to_string(model.n)},
           {"scale_d", format_real(model.quant.scale_d)},
           {"scale_p", format_real(model.quant.scale_p)},
           {"score_bound", std::to_string(model.score_bound)}};
  if (model.public_head) h["public_head_layers"] = format_layers(model.public_head->layers);

  Writer w;
  w.header(h);
  w.int_tensor<std::int32_t>(model.projection.values());
  std::vector<std::int64_t> flat;
  for (const auto& row : model.diag) flat.insert(flat.end(), row.begin(), row.end());
  w.int_tensor<std::int32_t>(flat);
  if (model.public_head) w.f32_tensor(model.public_head->weights);
  return w.take();
}

QuadModel decode_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const Header h = read_header(r, "model");
  check_keys_known(r, h, {"bits", "classes", "d", "input_bits", "kind", "max_abs_d", "max_abs_p",
                          "n", "public_head_layers", "scale_d", "scale_p", "score_bound"});
  QuadModel m;
  m.quant.bits = int(header_int(r, h, "bits", 2, 16));
  m.quant.input_bits = int(header_int(r, h, "input_bits", 1, 8));
  m.quant.scale_p = header_real(r, h, "scale_p");
  m.quant.scale_d = header_real(r, h, "scale_d");
  m.quant.max_abs_p = header_real(r, h, "max_abs_p");
  m.quant.max_abs_d = header_real(r, h, "max_abs_d");
  m.n = std::size_t(header_int(r, h, "n", 0, kMaxDim));
  const auto d = std::size_t(header_int(r, h, "d", 1, kMaxDim));
  const auto classes = std::size_t(header_int(r, h, "classes", 1, kMaxDim));
  m.score_bound = header_int(r, h, "score_bound", 0, INT64_MAX);

  r.section("tensor:P");
  m.projection = IntMatrix(d, m.n + 1, r.int_tensor<std::int32_t>(std::uint64_t(d) * (m.n + 1)));
  r.section("tensor:diag");
  const auto flat = r.int_tensor<std::int32_t>(std::uint64_t(classes) * d);
  for (std::size_t c = 0; c < classes; ++c) {
    m.diag.emplace_back(flat.begin() + std::ptrdiff_t(c * d),
                        flat.begin() + std::ptrdiff_t((c + 1) * d));
  }
  if (auto it = h.find("public_head_layers"); it != h.end()) {
    r.section("public_head");
    PublicHead head;
    std::string_view s = it->second;
    while (!s.empty()) {
      const auto comma = s.find(',');
      const auto tok = s.substr(0, comma);
      std::uint32_t v = 0;
      auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || end != tok.data() + tok.size()) {
        r.fail(ErrorCode::kInvalidFormat, "bad layer list '" + it->second + "'");
      }
      head.layers.push_back(v);
      s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    }
    if (format_layers(head.layers) != it->second) {
      r.fail(ErrorCode::kInvalidFormat, "non-canonical layer list '" + it->second + "'");
    }
    head.weights = r.f32_tensor();
    m.public_head = std::move(head);
  }
  r.finish();

  r.section("invariants");
  try {
    m.validate();
  } catch (const Error& e) {
    r.fail(ErrorCode::kInvalidFormat, e.what());
  }
  if (BigInt(std::to_string(m.score_bound)) < score_bound(m, m.quant.input_max())) {
    r.fail(ErrorCode::kInvalidFormat, "stored score_bound below the bound implied by the weights");
  }
  return m;
}

// ---- keys -----------------------------------------------------------------

Bytes encode_public_key(const PublicKey& pk, std::optional<int> input_bits) {
  Header h{{"curve", std::string(pk.group.curve_id())},
           {"kind", "pk"},
           {"n", std::to_string(pk.dim())}};
  if (input_bits) h["input_bits"] = std::to_string(*input_bits);
  Writer w;
  w.header(h);
  w.element_list(encodings(pk.g1_s));
  w.element_list(encodings(pk.g2_t));
  return w.take();
}

PublicKeyFile decode_public_key(std::span<const std::uint8_t> bytes, const GroupContext& group) {
  Reader r(bytes);
  const Header h = read_header(r, "pk");
  check_keys_known(r, h, {"curve", "input_bits", "kind", "n"});
  check_curve(r, h, group);
  const auto n = std::size_t(header_int(r, h, "n", 1, kMaxDim));
  PublicKeyFile out{PublicKey{group, {}, {}}, std::nullopt};
  if (h.count("input_bits")) out.input_bits = int(header_int(r, h, "input_bits", 1, 8));
  r.section("g1_s");
  out.pk.g1_s = r.decode_list<G1>(n, kG1Bytes);
  r.section("g2_t");
  out.pk.g2_t = r.decode_list<G2>(n, kG2Bytes);
  r.finish();
  return out;
}

Bytes encode_secret_key(const MasterSecretKey& msk) {
  Writer w;
  w.header({{"curve", std::string(kCurveId)}, {"kind", "msk"}, {"n", std::to_string(msk.dim())}});
  w.element_list(encodings(msk.s));
  w.element_list(encodings(msk.t));
  return w.take();
}

MasterSecretKey decode_secret_key(std::span<const std::uint8_t> bytes, const GroupContext& group) {
  Reader r(bytes);
  const Header h = read_header(r, "msk");
  check_keys_known(r, h, {"curve", "kind", "n"});
  check_curve(r, h, group);
  const auto n = std::size_t(header_int(r, h, "n", 1, kMaxDim));
  MasterSecretKey msk;
  r.section("s");
  msk.s = r.decode_list<Scalar>(n, kScalarBytes);
  r.section("t");
  msk.t = r.decode_list<Scalar>(n, kScalarBytes);
  r.finish();
  return msk;
}

Bytes encode_functional_key(const FunctionalKey& dk, std::optional<std::size_t> class_index) {
  Header h{{"curve", std::string(kCurveId)},
           {"dim", std::to_string(dk.form.dim())},
           {"kind", "dk"}};
  if (class_index) h["class"] = std::to_string(*class_index);
  Writer w;
  w.header(h);
  w.element_list(std::vector{dk.k.encode()});
  w.int_tensor<std::int64_t>(dk.form.coefficients().values());
  return w.take();
}

FunctionalKeyFile decode_functional_key(std::span<const std::uint8_t> bytes,
                                        const GroupContext& group) {
  Reader r(bytes);
  const Header h = read_header(r, "dk");
  check_keys_known(r, h, {"class", "curve", "dim", "kind"});
  check_curve(r, h, group);
  const auto dim = std::size_t(header_int(r, h, "dim", 1, std::int64_t{1} << 14));
  FunctionalKeyFile out;
  if (h.count("class")) out.class_index = std::size_t(header_int(r, h, "class", 0, kMaxDim));
  r.section("k");
  out.key.k = r.decode_list<G2>(1, kG2Bytes).front();
  r.section("form");
  out.key.form = QuadraticForm(IntMatrix(dim, dim, r.int_tensor<std::int64_t>(dim * dim)));
  r.finish();
  return out;
}

// ---- ciphertext -----------------------------------------------------------

Bytes encode_ciphertext(const Ciphertext& ct) {
  Writer w;
  w.header({{"curve", std::string(kCurveId)}, {"kind", "ct"}, {"n", std::to_string(ct.dim())}});
  w.element_list(std::vector{ct.c_gamma.encode()});
  std::vector<G1> a;
  std::vector<G2> b;
  for (const auto& p : ct.a) a.insert(a.end(), p.begin(), p.end());
  for (const auto& p : ct.b) b.insert(b.end(), p.begin(), p.end());
  w.element_list(encodings(a));
  w.element_list(encodings(b));
  return w.take();
}

Ciphertext decode_ciphertext(std::span<const std::uint8_t> bytes, const GroupContext& group) {
  Reader r(bytes);
  const Header h = read_header(r, "ct");
  check_keys_known(r, h, {"curve", "kind", "n"});
  check_curve(r, h, group);
  const auto n = std::size_t(header_int(r, h, "n", 1, kMaxDim));
  Ciphertext ct;
  r.section("c_gamma");
  ct.c_gamma = r.decode_list<G1>(1, kG1Bytes).front();
  r.section("a");
  const auto a = r.decode_list<G1>(2 * n, kG1Bytes);
  r.section("b");
  const auto b = r.decode_list<G2>(2 * n, kG2Bytes);
  r.finish();
  ct.a.resize(n);
  ct.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ct.a[i] = {a[2 * i], a[2 * i + 1]};
    ct.b[i] = {b[2 * i], b[2 * i + 1]};
  }
  return ct;
}

// ---- files ----------------------------------------------------------------

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace qfe
