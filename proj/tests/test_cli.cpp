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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "cli_io.hpp"
#include "qfe/model_io.hpp"
#include "qfe/quadnet.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace qfe;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Workdir {
 public:
  Workdir() {
    dir_ = fs::temp_directory_path() / ("qfe_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

  Run run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " + QFE_CLI_PATH + " " + args + " > " +
                            (dir_ / "stdout").string() + " 2> " + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir_ / "stdout"),
            slurp(dir_ / "stderr")};
  }

 private:
  fs::path dir_;
};

// The last stderr line must be the one-line diagnostic.
void check_diagnostic(const Run& r, const std::string& code) {
  const std::regex line("error: code=" + code + " exit=" + std::to_string(r.code) +
                        " msg=\"[^\n]*\"\n$");
  CHECK_MESSAGE(std::regex_search(r.err, line), r.err);
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string pixels_json(std::size_t n, int value) {
  std::string s = "[";
  for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(value);
  return s + "]";
}

}  // namespace

TEST_CASE("image parsing") {
  const std::string pgm = "P5\n# comment\n3 2\n255\n\x01\x02\x03\x04\x05\xff";
  const std::vector<std::uint8_t> b(pgm.begin(), pgm.end());
  CHECK(cli::parse_pgm(b) == std::vector<std::int64_t>{1, 2, 3, 4, 5, 255});

  const std::string small("P5 2 1 15\n\x0f\x00", 12);
  CHECK(cli::parse_pgm(std::vector<std::uint8_t>(small.begin(), small.end())) ==
        std::vector<std::int64_t>{255, 0});

  const std::string truncated = "P5\n3 2\n255\n\x01\x02";
  CHECK_THROWS_AS(cli::parse_pgm(std::vector<std::uint8_t>(truncated.begin(), truncated.end())),
                  Error);
  const std::string sixteen = "P5\n1 1\n65535\n\x01\x02";
  CHECK_THROWS_AS(cli::parse_pgm(std::vector<std::uint8_t>(sixteen.begin(), sixteen.end())),
                  Error);

  const std::string js = "[0, 17, 255]";
  CHECK(cli::parse_json_pixels(std::vector<std::uint8_t>(js.begin(), js.end())) ==
        std::vector<std::int64_t>{0, 17, 255});
  const std::string bad = "[0, 1.5]";
  CHECK_THROWS_AS(cli::parse_json_pixels(std::vector<std::uint8_t>(bad.begin(), bad.end())),
                  Error);
  const std::string obj = "{\"a\": 1}";
  CHECK_THROWS_AS(cli::parse_json_pixels(std::vector<std::uint8_t>(obj.begin(), obj.end())),
                  Error);
}

TEST_CASE("exit codes are distinct per category") {
  std::set<int> codes;
  for (auto c : {cli::kExitOk, cli::kExitInternal, cli::kExitUsage, cli::kExitIo, cli::kExitFormat,
                 cli::kExitCurve, cli::kExitCapacity, cli::kExitRange, cli::kExitInput})
    codes.insert(c);
  CHECK(codes.size() == 9);
  CHECK(cli::exit_code_for(ErrorCode::kCurveMismatch) == cli::kExitCurve);
  CHECK(cli::exit_code_for(ErrorCode::kTruncated) == cli::kExitFormat);
  CHECK(cli::exit_code_for(ErrorCode::kOutOfRange) == cli::kExitRange);
  CHECK(cli::diagnostic("io", 3, "a \"b\"\nc") == "error: code=io exit=3 msg=\"a \\\"b\\\" c\"");
}

TEST_CASE("pipeline on a small model") {
  Workdir w;
  qfe::testing::Gen gen(5);
  const QuadModel model = qfe::testing::random_model(gen, 6, 3, 3);
  save_model(w / "model.qfe", model);
  const std::string m = (w / "model.qfe").string();
  const std::string keys = (w / "keys").string();

  Run r = w.run("keygen --model " + m + " --out-dir " + keys);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(w / "keys/pk.qfe"));
  CHECK(fs::exists(w / "keys/msk.qfe"));
  for (int c = 0; c < 3; ++c) CHECK(fs::exists(w / ("keys/dk_" + std::to_string(c) + ".qfe")));
  CHECK_FALSE(fs::exists(w / "keys/dk_3.qfe"));

  const std::vector<std::int64_t> pixels{0, 40, 80, 120, 200, 255};
  write_text(w / "img.json", "[0, 40, 80, 120, 200, 255]");
  const std::string pk = (w / "keys/pk.qfe").string();
  r = w.run("enc --pk " + pk + " --image " + (w / "img.json").string() + " --out " +
            (w / "ct.qfe").string());
  REQUIRE(r.code == 0);

  const std::string infer_args = "infer --pk " + pk + " --ct " + (w / "ct.qfe").string() +
                                 " --keys " + keys + " --model " + m;
  r = w.run(infer_args + " --json --out " + (w / "scores.json").string());
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const auto x = quantize_input(pixels, 4);
  std::vector<std::int64_t> expect;
  for (const auto& z : infer_plaintext_oracle(model, x)) expect.push_back(z.get_si());
  CHECK(doc["scores"].get<std::vector<std::int64_t>>() == expect);
  CHECK(doc["argmax"].get<std::size_t>() == argmax(expect));
  for (const char* phase : {"table", "projection", "pairing", "combine", "evaluation", "dlog"})
    CHECK(doc["timings_ms"].contains(phase));
  CHECK(nlohmann::json::parse(slurp(w / "scores.json"))["scores"] == doc["scores"]);

  r = w.run(infer_args + " --out " + (w / "scores.bin").string() + " --out-format binary");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("argmax: ") != std::string::npos);
  CHECK(fs::file_size(w / "scores.bin") == 8 + 8 * 3);

  SUBCASE("dkgen reissues the same keys") {
    r = w.run("dkgen --msk " + (w / "keys/msk.qfe").string() + " --model " + m + " --out-dir " +
              (w / "keys2").string());
    REQUIRE(r.code == 0);
    CHECK(slurp(w / "keys2/dk_1.qfe") == slurp(w / "keys/dk_1.qfe"));
  }
  SUBCASE("usage errors") {
    r = w.run("keygen --out-dir " + keys);
    CHECK(r.code == 2);
    check_diagnostic(r, "usage");
    r = w.run("");
    CHECK(r.code == 2);
    r = w.run("enc --pk " + pk + " --image x --out y --seed 4");
    CHECK(r.code == 2);
    check_diagnostic(r, "usage");
  }
  SUBCASE("seeded runs are reproducible only under --insecure-test") {
    const std::string enc = "--insecure-test --seed 9 enc --pk " + pk + " --image " +
                            (w / "img.json").string() + " --out ";
    REQUIRE(w.run(enc + (w / "s1.qfe").string()).code == 0);
    REQUIRE(w.run(enc + (w / "s2.qfe").string()).code == 0);
    CHECK(slurp(w / "s1.qfe") == slurp(w / "s2.qfe"));
    CHECK(slurp(w / "s1.qfe") != slurp(w / "ct.qfe"));
  }
  SUBCASE("missing file is an I/O error") {
    r = w.run("keygen --model " + (w / "nope.qfe").string() + " --out-dir " + keys);
    CHECK(r.code == 3);
    check_diagnostic(r, "io");
  }
  SUBCASE("corrupt model is a format error") {
    std::string bytes = slurp(w / "model.qfe");
    bytes[0] = 'X';
    write_text(w / "bad.qfe", bytes);
    r = w.run("keygen --model " + (w / "bad.qfe").string() + " --out-dir " + keys);
    CHECK(r.code == 4);
    check_diagnostic(r, "bad_magic");
    write_text(w / "short.qfe", slurp(w / "model.qfe").substr(0, 40));
    r = w.run(infer_args.substr(0, infer_args.find(" --model")) + " --model " +
              (w / "short.qfe").string());
    CHECK(r.code == 4);
    check_diagnostic(r, "truncated");
  }
  SUBCASE("foreign curve") {
    std::string bytes = slurp(w / "keys/pk.qfe");
    const auto at = bytes.find("BLS12-381");
    REQUIRE(at != std::string::npos);
    bytes.replace(at, 9, "BLS12-377");
    write_text(w / "pk377.qfe", bytes);
    r = w.run("enc --pk " + (w / "pk377.qfe").string() + " --image " +
              (w / "img.json").string() + " --out " + (w / "c.qfe").string());
    CHECK(r.code == 5);
    check_diagnostic(r, "curve_mismatch");
  }
  SUBCASE("table over the memory cap") {
    QuadModel wide = model;
    wide.score_bound = std::int64_t{1} << 50;
    save_model(w / "wide.qfe", wide);
    r = w.run(infer_args.substr(0, infer_args.find(" --model")) + " --model " +
              (w / "wide.qfe").string());
    CHECK(r.code == 6);
    check_diagnostic(r, "capacity");
    r = w.run(infer_args, "QFE_DLOG_CAP_MB=0");
    CHECK(r.code == 6);
    r = w.run("--dlog-cap-mb 0 " + infer_args);
    CHECK(r.code == 6);
  }
  SUBCASE("keys from another master key fall out of range") {
    REQUIRE(w.run("keygen --model " + m + " --out-dir " + (w / "other").string()).code == 0);
    r = w.run("infer --pk " + pk + " --ct " + (w / "ct.qfe").string() + " --keys " +
              (w / "other").string() + " --model " + m);
    CHECK(r.code == 7);
    check_diagnostic(r, "out_of_range");
  }
  SUBCASE("bad inputs") {
    write_text(w / "long.json", pixels_json(7, 3));
    r = w.run("enc --pk " + pk + " --image " + (w / "long.json").string() + " --out " +
              (w / "c.qfe").string());
    CHECK(r.code == 8);
    check_diagnostic(r, "dimension_mismatch");
    write_text(w / "hot.json", "[0, 0, 0, 0, 0, 300]");
    r = w.run("enc --pk " + pk + " --image " + (w / "hot.json").string() + " --out " +
              (w / "c.qfe").string());
    CHECK(r.code == 8);
    check_diagnostic(r, "out_of_bound");
    QuadModel other = model;
    other.diag[0][0] = other.diag[0][0] == 7 ? 6 : 7;
    other.score_bound = score_bound(other, 15).get_si();
    save_model(w / "other.qfe", other);
    r = w.run(infer_args.substr(0, infer_args.find(" --model")) + " --model " +
              (w / "other.qfe").string());
    CHECK(r.code == 8);
  }
}

TEST_CASE("bench reports every phase") {
  Workdir w;
  const Run r = w.run("bench --n 12 --d 3 --classes 2 --reps 2 --json");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  for (const char* phase : {"keygen", "encryption", "evaluation", "dlog"}) {
    CHECK(doc["phases_ms"][phase]["samples"].size() == 2);
    CHECK(doc["phases_ms"][phase]["mean"].get<double>() >= 0);
    CHECK(doc["phases_ms"][phase].contains("stddev"));
  }
  CHECK(doc["verified"] == 2);
  CHECK(w.run("bench --n 12 --d 20").code == 8);
}
