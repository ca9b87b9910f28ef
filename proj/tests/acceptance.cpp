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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qfe/dlog.hpp"
#include "qfe/projection.hpp"
#include "qfe/quadnet.hpp"
#include "qfe/quantizer.hpp"
#include "qfe/scheme.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qfe;
using qfe::testing::Gen;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome crit_correctness() {
  const auto t0 = Clock::now();
  const auto g = GroupContext::setup();
  SeededRandom rng(101);
  Gen gen(101);
  const auto table = DlogTable::build(g, 8 * 8 * 8 * 16 * 16);
  int exact = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto n = static_cast<std::size_t>(gen.uniform(1, 8));
    const FunctionClass fc{n, 16, 16, 8};
    const auto [pk, msk] = setup(fc, g, rng);
    const auto x = gen.vec(n, -16, 16), y = gen.vec(n, -16, 16);
    const IntMatrix q = gen.matrix(n, n, -8, 8);
    const auto ct = encrypt(pk, x, y, fc, rng);
    const std::int64_t z = decrypt(pk, ct, keygen(g, msk, QuadraticForm(q)), table);
    exact += BigInt(static_cast<long>(z)) == qfe::testing::plain_form(q, x, y);
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%d exact, %.1f s (limit 120 s)", exact, trials, secs);
  return {exact == trials && secs < 120.0, buf};
}

Outcome crit_homomorphism() {
  const auto g = GroupContext::setup();
  SeededRandom rng(202);
  Gen gen(202);
  struct Trial {
    std::size_t n, d;
    std::vector<std::int64_t> x, y;
    ProjectionPair p;
    IntMatrix q;
    BigInt expect;
  };
  std::vector<Trial> trials;
  BigInt worst = 0;
  for (int i = 0; i < 200; ++i) {
    Trial t;
    t.n = static_cast<std::size_t>(gen.uniform(1, 8));
    t.d = static_cast<std::size_t>(gen.uniform(1, std::int64_t(t.n)));
    t.x = gen.vec(t.n, -16, 16);
    t.y = gen.vec(t.n, -16, 16);
    t.p = {gen.matrix(t.d, t.n, -4, 4), gen.matrix(t.d, t.n, -4, 4)};
    t.q = gen.matrix(t.d, t.d, -8, 8);
    const auto ux = qfe::testing::apply_big(t.p.u, qfe::testing::lift(t.x));
    const auto vy = qfe::testing::apply_big(t.p.v, qfe::testing::lift(t.y));
    t.expect = 0;
    for (std::size_t k = 0; k < t.d; ++k)
      for (std::size_t l = 0; l < t.d; ++l) t.expect += BigInt(long(t.q(k, l))) * ux[k] * vy[l];
    // Composed bound d^2 * Bq * B'x * B'y with B' = n * max|U| * 16.
    const BigInt bound = BigInt(long(t.d * t.d * 8)) * long(t.n * 4 * 16) * long(t.n * 4 * 16);
    worst = std::max(worst, bound);
    trials.push_back(std::move(t));
  }
  if (worst >= 1000000000) return {false, "composed bound " + worst.get_str() + " >= 1e9"};
  const auto table = DlogTable::build(g, worst.get_si());
  int exact = 0;
  for (const auto& t : trials) {
    const FunctionClass fc{t.n, 16, 16, 8};
    const auto [pk, msk] = setup(fc, g, rng);
    const auto pct = project(g, encrypt(pk, t.x, t.y, fc, rng), t.p, fc);
    const auto dk = projected_keygen(g, msk, t.p, QuadraticForm(t.q));
    exact += BigInt(static_cast<long>(decrypt(pk, pct.ct, dk, table))) == t.expect;
  }
  return {exact == 200, std::to_string(exact) + "/200 exact, composed bound " + worst.get_str()};
}

Outcome crit_complexity() {
  const auto g = GroupContext::setup();
  SeededRandom rng(303);
  Gen gen(303);
  std::string detail;
  bool ok = true;

  // (a) dense decrypt
  for (std::size_t n = 1; n <= 8; ++n) {
    const FunctionClass fc{n, 16, 16, 8};
    const auto [pk, msk] = setup(fc, g, rng);
    const auto ct = encrypt(pk, gen.vec(n, -16, 16), gen.vec(n, -16, 16), fc, rng);
    const auto dk = keygen(g, msk, QuadraticForm(gen.dense_matrix(n, n, 8)));
    const auto ops = g.measure([&] { decrypt_to_group(g, ct, dk); });
    ok = ok && ops.pairings == 2 * n * n + 1;
  }
  detail += ok ? "(a) 2n^2+1 for n=1..8" : "(a) FAILED";

  // (b) cross-term pairings independent of the class count
  const std::size_t n = 48, d = 6;
  QuadModel base = qfe::testing::random_model(gen, n, d, 10);
  bool b_ok = true;
  std::vector<std::uint64_t> cross_counts;
  for (std::size_t classes = 1; classes <= 10; ++classes) {
    QuadModel m = base;
    m.diag.resize(classes);
    m.score_bound = score_bound(m, 15).get_si();
    const FunctionClass fc = input_function_class(m);
    const auto [pk, msk] = setup(fc, g, rng);
    const auto keys = keygen_model(g, msk, m);
    const auto ct = encrypt_input(pk, gen.vec(n, 0, 15), fc, rng);
    const auto projected = project(g, ct, model_projection(m), fc);
    const auto cross = g.measure([&] { build_pairing_cache(g, projected.ct); });
    cross_counts.push_back(cross.pairings);
    const auto table = DlogTable::build(g, m.score_bound);
    const auto total = g.measure([&] { infer_encrypted(pk, ct, keys, m, table); });
    b_ok = b_ok && cross.pairings == 2 * d && total.pairings == 2 * d + classes;
  }
  ok = ok && b_ok;
  detail += b_ok ? "; (b) 2d=" + std::to_string(2 * d) + " cross pairings for l=1..10"
                 : "; (b) FAILED";

  // (c) projection exponentiations, n vs 2n at fixed d
  std::uint64_t exps[2];
  for (int i = 0; i < 2; ++i) {
    const std::size_t width = i == 0 ? 64 : 128;  // augmented dimension
    QuadModel m;
    m.n = width - 1;
    m.projection = gen.dense_matrix(d, width, 7);
    m.diag = {gen.vec(d, -8, 7)};
    m.score_bound = score_bound(m, 15).get_si();
    const FunctionClass fc = input_function_class(m);
    const auto [pk, msk] = setup(fc, g, rng);
    const auto ct = encrypt_input(pk, gen.vec(m.n, 0, 15), fc, rng);
    exps[i] = g.measure([&] { project(g, ct, model_projection(m), fc); }).exponentiations();
  }
  const double ratio = double(exps[1]) / double(exps[0]);
  const bool c_ok = ratio >= 1.8 && ratio <= 2.2;
  ok = ok && c_ok;
  char buf[96];
  std::snprintf(buf, sizeof buf, "; (c) exp ratio %.3f (%llu vs %llu)", ratio,
                static_cast<unsigned long long>(exps[1]), static_cast<unsigned long long>(exps[0]));
  detail += buf;
  return {ok, detail};
}

Outcome crit_dlog() {
  const auto g = GroupContext::setup();
  const std::int64_t B = 1000000;
  Gen gen(404);
  const auto table = DlogTable::build(g, B);
  std::vector<std::int64_t> zs(1000);
  std::vector<GT> targets;
  for (auto& z : zs) {
    z = gen.uniform(-B, B);
    targets.push_back(g.exp(g.gt(), z));
  }
  int exact = 0;
  auto t0 = Clock::now();
  for (std::size_t i = 0; i < zs.size(); ++i) exact += table.solve(targets[i]) == zs[i];
  const double table_mean = seconds_since(t0) / double(zs.size());

  // Linear scan over [-B, B] from the bottom, on a subset of the same targets.
  const GT start = g.exp(g.gt(), -B);
  const std::size_t scans = 8;
  int scan_exact = 0;
  t0 = Clock::now();
  for (std::size_t i = 0; i < scans; ++i) {
    GT cur = start;
    std::int64_t z = -B;
    while (!(cur == targets[i]) && z < B) {
      cur *= g.gt();
      ++z;
    }
    scan_exact += z == zs[i];
  }
  const double scan_mean = seconds_since(t0) / double(scans);
  const double speedup = scan_mean / table_mean;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d/1000 exact; table %.3f ms/solve, linear scan %.1f ms/solve, speedup %.0fx "
                "(need 100x)",
                exact, table_mean * 1e3, scan_mean * 1e3, speedup);
  return {exact == 1000 && scan_exact == int(scans) && speedup >= 100.0, buf};
}

struct Cmd {
  int code;
  std::string out;
};

Cmd run(const std::string& args, const fs::path& work) {
  const fs::path out = work / "stdout.txt";
  const std::string cmd = std::string(QFE_CLI_PATH) + " " + args + " > " + out.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome crit_golden(const fs::path& work) {
  const fs::path fix = QFE_GOLDEN_DIR;
  const json expected = json::parse(slurp(fix / "expected_scores.json"));
  const std::string model = (fix / "model.qfe").string();
  const std::string keys = (work / "keys").string();
  if (run("keygen --model " + model + " --out-dir " + keys, work).code != 0)
    return {false, "keygen failed"};
  const std::string pk = (work / "keys" / "pk.qfe").string();
  json got[2];
  for (int i = 0; i < 2; ++i) {
    const std::string ct = (work / ("ct" + std::to_string(i) + ".qfe")).string();
    if (run("enc --pk " + pk + " --image " + (fix / "image.pgm").string() + " --out " + ct, work)
            .code != 0)
      return {false, "enc failed"};
    const Cmd r = run("infer --pk " + pk + " --ct " + ct + " --keys " + keys + " --model " +
                          model + " --table " + (work / "table.qdlt").string() + " --json",
                      work);
    if (r.code != 0) return {false, "infer exited " + std::to_string(r.code)};
    got[i] = json::parse(r.out);
  }
  const bool differ = slurp(work / "ct0.qfe") != slurp(work / "ct1.qfe");
  const bool exact = got[0]["scores"] == expected["scores"] && got[1]["scores"] == expected["scores"];
  const bool arg = got[0]["argmax"] == expected["argmax"] && got[1]["argmax"] == expected["argmax"];
  return {exact && arg && differ,
          "scores " + got[0]["scores"].dump() + (exact ? " == " : " != ") + "expected " +
              expected["scores"].dump() + "; argmax " + got[0]["argmax"].dump() +
              (arg ? " matches" : " differs") + "; ciphertexts " +
              (differ ? "differ" : "IDENTICAL")};
}

Outcome crit_runtime(const fs::path& work) {
  const Cmd r = run("bench --n 785 --d 40 --classes 10 --reps 3 --json", work);
  if (r.code != 0) return {false, "bench exited " + std::to_string(r.code)};
  const json doc = json::parse(r.out);
  // Reference figures in ms; the soft target is 10x each.
  const std::pair<const char*, double> ref[] = {
      {"keygen", 94}, {"encryption", 12100}, {"evaluation", 2970}, {"dlog", 24}};
  bool reported = doc["verified"] == 3;
  std::string detail, soft_miss;
  for (const auto& [phase, ms] : ref) {
    if (!doc["phases_ms"].contains(phase) || doc["phases_ms"][phase]["samples"].size() != 3) {
      reported = false;
      continue;
    }
    const double mean = doc["phases_ms"][phase]["mean"].get<double>();
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s%s %.1f ms (ref %.0f)", detail.empty() ? "" : ", ", phase,
                  mean, ms);
    detail += buf;
    if (mean > 10 * ms) soft_miss += std::string(soft_miss.empty() ? "" : ",") + phase;
  }
  detail += soft_miss.empty() ? "; soft: all within 10x" : "; soft: over 10x for " + soft_miss;
  if (doc["verified"] != 3) detail += "; scores did not verify";
  return {reported, detail};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("qfe_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 perfect correctness", crit_correctness},
      {"2 linear homomorphism", crit_homomorphism},
      {"3 complexity accounting", crit_complexity},
      {"4 discrete log table", crit_dlog},
      {"5 golden fixture via CLI", [&] { return crit_golden(work); }},
      {"6 runtime at n=785 d=40 l=10", [&] { return crit_runtime(work); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
