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

// qfe: key generation, encryption, encrypted inference and benchmarks for
// quadratic networks. Run `qfe --help` for the subcommands.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_io.hpp"
#include "qfe/dlog.hpp"
#include "qfe/errors.hpp"
#include "qfe/group.hpp"
#include "qfe/model_io.hpp"
#include "qfe/quadnet.hpp"
#include "qfe/quantizer.hpp"
#include "qfe/random.hpp"
#include "qfe/scheme.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qfe;
using namespace qfe::cli;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  int security = 128;
  bool insecure_test = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap_mb;

  std::unique_ptr<RandomSource> rng() const {
    if (seed) return std::make_unique<SeededRandom>(*seed);
    return std::make_unique<SystemRandom>();
  }
  std::size_t dlog_cap() const { return cap_mb ? *cap_mb << 20 : dlog_cap_from_env(); }
};

fs::path key_path(const fs::path& dir, std::size_t cls) {
  return dir / ("dk_" + std::to_string(cls) + ".qfe");
}

void write_keys(const fs::path& dir, const std::vector<FunctionalKey>& keys) {
  for (std::size_t c = 0; c < keys.size(); ++c)
    write_file(key_path(dir, c), encode_functional_key(keys[c], c));
}

std::vector<FunctionalKey> read_keys(const fs::path& dir, const QuadModel& model,
                                     const GroupContext& group) {
  std::vector<FunctionalKey> keys;
  for (std::size_t c = 0; c < model.classes(); ++c) {
    auto file = decode_functional_key(read_file(key_path(dir, c)), group);
    if (file.class_index && *file.class_index != c) {
      throw Error(ErrorCode::kInvalidFormat, key_path(dir, c).string() + " holds the key for class " +
                                                 std::to_string(*file.class_index));
    }
    keys.push_back(std::move(file.key));
  }
  return keys;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

// --- keygen / dkgen ---------------------------------------------------------

struct KeygenArgs {
  fs::path model, out_dir, msk;
};

int cmd_keygen(const Globals& g, const KeygenArgs& a) {
  const QuadModel model = load_model(a.model);
  const GroupContext group = GroupContext::setup(g.security);
  auto rng = g.rng();
  ensure_dir(a.out_dir);

  auto t0 = Clock::now();
  const auto [pk, msk] = setup(input_function_class(model), group, *rng);
  const double setup_ms = ms_since(t0);
  t0 = Clock::now();
  const auto keys = keygen_model(group, msk, model);
  const double keygen_ms = ms_since(t0);

  write_file(a.out_dir / "pk.qfe", encode_public_key(pk, model.quant.input_bits));
  write_file(a.out_dir / "msk.qfe", encode_secret_key(msk));
  write_keys(a.out_dir, keys);
  std::printf("keygen: n=%zu d=%zu classes=%zu setup_ms=%.3f keygen_ms=%.3f out=%s\n",
              model.n, model.hidden(), model.classes(), setup_ms, keygen_ms,
              a.out_dir.string().c_str());
  return kExitOk;
}

int cmd_dkgen(const Globals& g, const KeygenArgs& a) {
  const QuadModel model = load_model(a.model);
  const GroupContext group = GroupContext::setup(g.security);
  const MasterSecretKey msk = decode_secret_key(read_file(a.msk), group);
  ensure_dir(a.out_dir);
  const auto t0 = Clock::now();
  const auto keys = keygen_model(group, msk, model);
  const double keygen_ms = ms_since(t0);
  write_keys(a.out_dir, keys);
  std::printf("dkgen: classes=%zu keygen_ms=%.3f out=%s\n", model.classes(), keygen_ms,
              a.out_dir.string().c_str());
  return kExitOk;
}

// --- enc --------------------------------------------------------------------

struct EncArgs {
  fs::path pk, image, out;
};

int cmd_enc(const Globals& g, const EncArgs& a) {
  const GroupContext group = GroupContext::setup(g.security);
  const PublicKeyFile pkf = decode_public_key(read_file(a.pk), group);
  const int input_bits = pkf.input_bits.value_or(4);
  const auto pixels = read_image(a.image);
  if (pixels.size() + 1 != pkf.pk.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image has " + std::to_string(pixels.size()) + " pixels, key expects " +
                    std::to_string(pkf.pk.dim() - 1));
  }
  const auto x = quantize_input(pixels, input_bits);
  const std::int64_t imax = (std::int64_t{1} << input_bits) - 1;
  const FunctionClass fc{pkf.pk.dim(), imax, imax, 1};
  auto rng = g.rng();

  const auto t0 = Clock::now();
  const Ciphertext ct = encrypt_input(pkf.pk, x, fc, *rng);
  const double enc_ms = ms_since(t0);
  save_ct(a.out, ct);
  std::printf("enc: n=%zu input_bits=%d encrypt_ms=%.3f out=%s\n", x.size(), input_bits, enc_ms,
              a.out.string().c_str());
  return kExitOk;
}

// --- infer ------------------------------------------------------------------

struct InferArgs {
  fs::path pk, ct, keys, model, out, table;
  bool json = false;
  std::string out_format = "json";
};

DlogTable obtain_table(const GroupContext& group, std::int64_t bound, std::size_t cap,
                       const fs::path& cache, bool* built) {
  *built = false;
  if (!cache.empty() && fs::exists(cache)) {
    std::ifstream in(cache, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + cache.string());
    DlogTable t = DlogTable::load(in, group);
    if (t.bound() >= bound) return t;
  }
  DlogTable t = DlogTable::build(group, bound, cap);
  *built = true;
  if (!cache.empty()) {
    std::ofstream out(cache, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot create " + cache.string());
    t.save(out);
  }
  return t;
}

void write_scores(const fs::path& path, const std::string& format, const json& doc,
                  const ScoreVector& scores) {
  if (format == "json") {
    const std::string text = doc.dump() + "\n";
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    return;
  }
  // u64 count, then i64 little-endian scores.
  Bytes out;
  auto put = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
  };
  put(scores.size());
  for (auto z : scores) put(static_cast<std::uint64_t>(z));
  write_file(path, out);
}

int cmd_infer(const Globals& g, const InferArgs& a) {
  const GroupContext group = GroupContext::setup(g.security);
  const QuadModel model = load_model(a.model);
  const PublicKeyFile pkf = decode_public_key(read_file(a.pk), group);
  const Ciphertext ct = load_ct(a.ct, group);
  const auto keys = read_keys(a.keys, model, group);

  auto t0 = Clock::now();
  bool built = false;
  const DlogTable table = obtain_table(group, model.score_bound, g.dlog_cap(), a.table, &built);
  const double table_ms = ms_since(t0);

  InferTimings t;
  const ScoreVector scores = infer_encrypted(pkf.pk, ct, keys, model, table, &t);
  const std::size_t best = argmax(scores);

  json doc;
  doc["scores"] = scores;
  doc["argmax"] = best;
  doc["timings_ms"] = {{"table", table_ms},        {"projection", t.projection_ms},
                       {"pairing", t.pairing_ms},  {"combine", t.combine_ms},
                       {"evaluation", t.evaluation_ms()}, {"dlog", t.dlog_ms}};
  doc["table"] = {{"bound", table.bound()}, {"baby_steps", table.baby_steps()}, {"built", built}};
  if (!a.out.empty()) write_scores(a.out, a.out_format, doc, scores);

  if (a.json) {
    std::printf("%s\n", doc.dump().c_str());
  } else {
    std::printf("scores:");
    for (auto z : scores) std::printf(" %lld", static_cast<long long>(z));
    std::printf("\nargmax: %zu\n", best);
    std::printf(
        "timing_ms: table=%.3f projection=%.3f pairing=%.3f combine=%.3f evaluation=%.3f "
        "dlog=%.3f\n",
        table_ms, t.projection_ms, t.pairing_ms, t.combine_ms, t.evaluation_ms(), t.dlog_ms);
  }
  return kExitOk;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::size_t n = 785;  // augmented width, bias slot included
  std::size_t d = 40;
  std::size_t classes = 10;
  int reps = 3;
  double density = 1.0;
  int bits = 4;
  bool json = false;
};

QuadModel bench_model(const BenchArgs& a, RandomSource& rng) {
  std::uint64_t seed = 0;
  rng.fill(std::span(reinterpret_cast<std::uint8_t*>(&seed), sizeof seed));
  std::mt19937_64 eng(seed);
  QuadModel m;
  m.n = a.n - 1;
  m.quant.bits = a.bits;
  const std::int64_t lo = m.quant.weight_min(), hi = m.quant.weight_max();
  std::uniform_int_distribution<std::int64_t> w(lo, hi);
  std::bernoulli_distribution keep(a.density);
  m.projection = IntMatrix(a.d, a.n);
  for (std::size_t k = 0; k < a.d; ++k)
    for (std::size_t j = 0; j < a.n; ++j)
      if (keep(eng)) m.projection(k, j) = w(eng);
  for (std::size_t c = 0; c < a.classes; ++c) {
    std::vector<std::int64_t> row(a.d);
    for (auto& v : row) v = w(eng);
    m.diag.push_back(std::move(row));
  }
  const BigInt bound = score_bound(m, m.quant.input_max());
  if (!bound.fits_slong_p()) {
    throw Error(ErrorCode::kCapacity, "bench: score bound " + bound.get_str() +
                                          " exceeds 64 bits; lower --density or --d");
  }
  m.score_bound = bound.get_si();
  return m;
}

struct Stat {
  std::vector<double> samples;
  double mean() const {
    double s = 0;
    for (double v : samples) s += v;
    return samples.empty() ? 0 : s / double(samples.size());
  }
  double stddev() const {
    if (samples.size() < 2) return 0;
    const double mu = mean();
    double s = 0;
    for (double v : samples) s += (v - mu) * (v - mu);
    return std::sqrt(s / double(samples.size() - 1));
  }
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  if (a.n < 2 || a.d < 1 || a.classes < 1 || a.reps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bench: need n >= 2, d >= 1, classes >= 1, reps >= 1");
  }
  if (a.d > a.n) throw Error(ErrorCode::kInvalidArgument, "bench: d must not exceed n");
  if (!(a.density > 0.0 && a.density <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bench: density must be in (0, 1]");
  }
  const GroupContext group = GroupContext::setup(g.security);
  auto rng = g.rng();
  const QuadModel model = bench_model(a, *rng);
  const FunctionClass fc = input_function_class(model);

  auto t0 = Clock::now();
  const DlogTable table = DlogTable::build(group, model.score_bound, g.dlog_cap());
  const double table_ms = ms_since(t0);

  std::uniform_int_distribution<std::int64_t> pixel(0, model.quant.input_max());
  std::mt19937_64 eng(0x5eed);
  Stat setup_s, keygen_s, enc_s, eval_s, dlog_s;
  int verified = 0;
  for (int r = 0; r < a.reps; ++r) {
    t0 = Clock::now();
    const auto [pk, msk] = setup(fc, group, *rng);
    setup_s.samples.push_back(ms_since(t0));

    t0 = Clock::now();
    const auto keys = keygen_model(group, msk, model);
    keygen_s.samples.push_back(ms_since(t0));

    std::vector<std::int64_t> x(model.n);
    for (auto& v : x) v = pixel(eng);
    t0 = Clock::now();
    const Ciphertext ct = encrypt_input(pk, x, fc, *rng);
    enc_s.samples.push_back(ms_since(t0));

    InferTimings t;
    const ScoreVector z = infer_encrypted(pk, ct, keys, model, table, &t);
    eval_s.samples.push_back(t.evaluation_ms());
    dlog_s.samples.push_back(t.dlog_ms);

    const auto expect = infer_plaintext_oracle(model, x);
    bool ok = expect.size() == z.size();
    for (std::size_t c = 0; ok && c < z.size(); ++c) ok = expect[c] == z[c];
    verified += ok;
  }

  const std::pair<const char*, const Stat*> phases[] = {
      {"setup", &setup_s}, {"keygen", &keygen_s}, {"encryption", &enc_s},
      {"evaluation", &eval_s}, {"dlog", &dlog_s}};
  if (a.json) {
    json doc;
    doc["config"] = {{"n", a.n},         {"d", a.d},       {"classes", a.classes},
                     {"reps", a.reps},   {"density", a.density}, {"bits", a.bits},
                     {"score_bound", model.score_bound}, {"baby_steps", table.baby_steps()},
                     {"table_build_ms", table_ms}};
    for (const auto& [name, s] : phases)
      doc["phases_ms"][name] = {{"mean", s->mean()}, {"stddev", s->stddev()}, {"samples", s->samples}};
    doc["verified"] = verified;
    std::printf("%s\n", doc.dump().c_str());
  } else {
    std::printf("bench: n=%zu d=%zu classes=%zu reps=%d density=%g bits=%d\n", a.n, a.d,
                a.classes, a.reps, a.density, a.bits);
    std::printf("table: score_bound=%lld baby_steps=%llu build_ms=%.1f\n",
                static_cast<long long>(model.score_bound),
                static_cast<unsigned long long>(table.baby_steps()), table_ms);
    for (const auto& [name, s] : phases)
      std::printf("%-11s %12.3f ms +- %.3f\n", name, s->mean(), s->stddev());
    std::printf("verified: %d/%d score vectors match the integer oracle\n", verified, a.reps);
  }
  return verified == a.reps ? kExitOk : kExitInternal;
}

int fail(std::string_view code, int exit_code, std::string_view msg) {
  std::fflush(stdout);
  std::fprintf(stderr, "%s\n", diagnostic(code, exit_code, msg).c_str());
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional encryption for quadratic networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--security", g.security, "Security level in bits")->default_val(128);
  auto* seed_opt = app.add_option("--seed", seed, "Deterministic RNG seed (needs --insecure-test)");
  app.add_flag("--insecure-test", g.insecure_test, "Allow --seed; never use for real keys");
  auto* cap_opt = app.add_option("--dlog-cap-mb", g.cap_mb,
                                 "Memory cap for the dlog table (default QFE_DLOG_CAP_MB or 512)");
  (void)cap_opt;

  KeygenArgs kg;
  auto* keygen = app.add_subcommand("keygen", "Create pk, msk and one key per class");
  keygen->add_option("--model", kg.model, "Model file")->required();
  keygen->add_option("--out-dir", kg.out_dir, "Output directory")->required();

  KeygenArgs dk;
  auto* dkgen = app.add_subcommand("dkgen", "Issue class keys for a model from an existing msk");
  dkgen->add_option("--msk", dk.msk, "Master secret key file")->required();
  dkgen->add_option("--model", dk.model, "Model file")->required();
  dkgen->add_option("--out-dir", dk.out_dir, "Output directory")->required();

  EncArgs en;
  auto* enc = app.add_subcommand("enc", "Encrypt an image (PGM P5 or JSON array)");
  enc->add_option("--pk", en.pk, "Public key file")->required();
  enc->add_option("--image", en.image, "Image file")->required();
  enc->add_option("--out", en.out, "Ciphertext output")->required();

  InferArgs in;
  auto* infer = app.add_subcommand("infer", "Evaluate the model on a ciphertext");
  infer->add_option("--pk", in.pk, "Public key file")->required();
  infer->add_option("--ct", in.ct, "Ciphertext file")->required();
  infer->add_option("--keys", in.keys, "Directory holding dk_<i>.qfe")->required();
  infer->add_option("--model", in.model, "Model file")->required();
  infer->add_flag("--json", in.json, "Print JSON");
  infer->add_option("--out", in.out, "Also write the scores to this file");
  infer->add_option("--out-format", in.out_format, "json or binary")
      ->check(CLI::IsMember({"json", "binary"}));
  infer->add_option("--table", in.table, "Dlog table cache file (loaded if present, else saved)");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Time keygen, encryption, evaluation and dlog");
  bench->add_option("--n", bn.n, "Input width including the bias slot")->default_val(785);
  bench->add_option("--d", bn.d, "Hidden width")->default_val(40);
  bench->add_option("--classes", bn.classes, "Number of classes")->default_val(10);
  bench->add_option("--reps", bn.reps, "Repetitions")->default_val(3);
  bench->add_option("--density", bn.density, "Fraction of nonzero projection weights")
      ->default_val(1.0);
  bench->add_option("--bits", bn.bits, "Weight bit width")->default_val(4)->check(CLI::Range(2, 16));
  bench->add_flag("--json", bn.json, "Print JSON");

  try {
    app.parse(argc, argv);
    if (seed_opt->count() > 0) {
      if (!g.insecure_test) throw UsageError("--seed is only accepted with --insecure-test");
      g.seed = seed;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return fail("usage", kExitUsage, e.what());
  } catch (const UsageError& e) {
    return fail("usage", kExitUsage, e.what());
  }

  try {
    if (*keygen) return cmd_keygen(g, kg);
    if (*dkgen) return cmd_dkgen(g, dk);
    if (*enc) return cmd_enc(g, en);
    if (*infer) return cmd_infer(g, in);
    if (*bench) return cmd_bench(g, bn);
  } catch (const Error& e) {
    return fail(error_code_name(e.code()), exit_code_for(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", kExitInternal, e.what());
  }
  return kExitInternal;
}
