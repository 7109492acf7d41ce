// Copyright 2026 The leaf-frontend Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const auto out = leaf::testing::temp_path("cli_stdout.txt");
  const auto err = leaf::testing::temp_path("cli_stderr.txt");
  const std::string cmd = std::string(LEAF_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::filesystem::path tone_wav(const std::string& name) {
  std::vector<std::int16_t> pcm(16000);
  for (std::size_t t = 0; t < pcm.size(); ++t) {
    pcm[t] = static_cast<std::int16_t>(6000.0 * std::sin(2.0 * 3.141592653589793 * 700.0 * t / 16000.0));
  }
  const auto path = leaf::testing::temp_path(name);
  leaf::testing::write_wav(path, pcm);
  return path;
}

}  // namespace

TEST_CASE("extract writes a LEAF feature file") {
  const auto wav = tone_wav("cli_in.wav");
  const auto out = leaf::testing::temp_path("cli_out.leaf");
  std::filesystem::remove(out);
  const Run r = run("extract --input " + wav.string() + " --frontend leaf --out " + out.string());
  CHECK(r.code == 0);
  const std::string bytes = slurp(out);
  REQUIRE(bytes.size() == 20 + 4 * 100 * 40);
  CHECK(bytes.substr(0, 4) == "LEAF");
  CHECK(r.out.find("param_count 280") != std::string::npos);
}

TEST_CASE("param count report for mel-pcen at 64 filters") {
  const auto wav = tone_wav("cli_in64.wav");
  const Run r = run("extract --input " + wav.string() + " --frontend mel-pcen --filters 64");
  CHECK(r.code == 0);
  CHECK(r.out.find("param_count 256") != std::string::npos);
}

TEST_CASE("compare prints one correlation per channel") {
  const auto wav = tone_wav("cli_cmp.wav");
  const Run r = run("extract --input " + wav.string() + " --compare");
  CHECK(r.code == 0);
  CHECK(r.out.find("channel,correlation\n") != std::string::npos);
  std::size_t lines = 0;
  for (char c : r.out.substr(r.out.find("channel,correlation\n"))) lines += c == '\n';
  CHECK(lines == 41);
}

TEST_CASE("usage errors exit with 2") {
  Run r = run("frobnicate");
  CHECK(r.code == 2);
  CHECK(!r.err.empty());
  r = run("extract --frontend leaf");
  CHECK(r.code == 2);
  r = run("extract --input x.wav --no-such-flag");
  CHECK(r.code == 2);
  r = run("");
  CHECK(r.code == 2);
}

TEST_CASE("runtime failures exit with 1 and name the error") {
  const Run r = run("extract --input /nonexistent/in.wav");
  CHECK(r.code == 1);
  CHECK(r.err.find("IoError") != std::string::npos);

  std::vector<std::int16_t> pcm(8000, 10);
  leaf::testing::WavSpec spec;
  spec.rate = 8000;
  const auto slow = leaf::testing::temp_path("cli_8k.wav");
  leaf::testing::write_wav(slow, pcm, spec);
  const Run bad = run("extract --input " + slow.string());
  CHECK(bad.code == 1);
  CHECK(bad.err.find("BadRate") != std::string::npos);
}

TEST_CASE("seeded commands are byte reproducible") {
  const auto dir_a = leaf::testing::temp_path("cli_train_a");
  const auto dir_b = leaf::testing::temp_path("cli_train_b");
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  const std::string common = " --task pitch --filters 8 --steps 2 --batch 4 --clip-s 0.1 --seed 3";
  REQUIRE(run("train" + common + " --out " + dir_a.string()).code == 0);
  REQUIRE(run("train" + common + " --out " + dir_b.string()).code == 0);
  CHECK(slurp(dir_a / "metrics.csv") == slurp(dir_b / "metrics.csv"));
  CHECK(slurp(dir_a / "snapshot_2" / "manifest.txt") == slurp(dir_b / "snapshot_2" / "manifest.txt"));

  const Run e1 = run("eval --model " + (dir_a / "snapshot_2").string() + " --task pitch --n 8 --seed 1");
  const Run e2 = run("eval --model " + (dir_b / "snapshot_2").string() + " --task pitch --n 8 --seed 1");
  CHECK(e1.code == 0);
  CHECK(e1.out == e2.out);

  const Run i = run("inspect --model " + (dir_a / "snapshot_2").string());
  CHECK(i.code == 0);
  CHECK(i.out.rfind("channel,center_hz,sigma,pool_width,alpha,delta,root,smooth\n", 0) == 0);

  const Run b1 = run("bootstrap --a 0.9,0.8,0.85 --b 0.7,0.82,0.6 --iters 2000 --seed 5");
  const Run b2 = run("bootstrap --a 0.9,0.8,0.85 --b 0.7,0.82,0.6 --iters 2000 --seed 5");
  CHECK(b1.code == 0);
  CHECK(b1.out == b2.out);
  CHECK(run("bootstrap --a 0.9,0.8 --b 0.7").code == 1);
}

TEST_CASE("config file is overridden by flags") {
  const auto cfg = leaf::testing::temp_path("cli.cfg");
  std::ofstream(cfg) << "n_filters=20\n";
  const auto wav = tone_wav("cli_cfg.wav");
  Run r = run("extract --input " + wav.string() + " --config " + cfg.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("param_count 140") != std::string::npos);
  r = run("extract --input " + wav.string() + " --config " + cfg.string() + " --filters 10");
  CHECK(r.out.find("param_count 70") != std::string::npos);
  std::ofstream(cfg) << "n_filterz=20\n";
  r = run("extract --input " + wav.string() + " --config " + cfg.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidConfig") != std::string::npos);
}
