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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "leaf/error.hpp"
#include "leaf/frontend.hpp"
#include "leaf/rng.hpp"
#include "leaf/signal.hpp"
#include "test_util.hpp"

using namespace leaf;
using leaf::testing::wav_bytes;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

}  // namespace

TEST_CASE("zero file loads as zeros at 16 kHz") {
  const std::vector<std::int16_t> pcm(16000, 0);
  const auto path = testing::temp_path("zeros.wav");
  testing::write_wav(path, pcm);
  const Waveform w = load_wav(path);
  CHECK(w.size() == 16000);
  CHECK(w.sample_rate() == 16000);
  for (double v : w.samples()) CHECK(v == 0.0);
}

TEST_CASE("PCM16 scaling") {
  const std::vector<std::int16_t> pcm{-32768, 16384, 0, 32767};
  const Waveform w = parse_wav(wav_bytes(pcm));
  CHECK(w.samples()[0] == -1.0);
  CHECK(w.samples()[1] == 0.5);
  CHECK(w.samples()[2] == 0.0);
  CHECK(w.samples()[3] == 32767.0 / 32768.0);
}

TEST_CASE("writer round trip is exact and unknown chunks are skipped") {
  Rng rng(3);
  std::vector<std::int16_t> pcm(777);
  for (auto& s : pcm) s = static_cast<std::int16_t>(static_cast<int>(rng.below(65536)) - 32768);
  testing::WavSpec spec;
  spec.extra_chunk = true;
  const Waveform w = parse_wav(wav_bytes(pcm, spec));
  REQUIRE(w.size() == pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    CHECK(static_cast<std::int16_t>(std::lround(w.samples()[i] * 32768.0)) == pcm[i]);
  }
}

TEST_CASE("8 kHz file loads but the frontend rejects it") {
  const std::vector<std::int16_t> pcm(8000, 100);
  testing::WavSpec spec;
  spec.rate = 8000;
  const Waveform w = parse_wav(wav_bytes(pcm, spec));
  CHECK(w.sample_rate() == 8000);
  const FrontendConfig cfg;
  const auto state = FrontendState::init(cfg);
  CHECK(code_of([&] { frontend_forward(w, state, cfg); }) == ErrorCode::kBadRate);
}

TEST_CASE("malformed WAV inputs") {
  const std::vector<std::int16_t> pcm(10, 1);
  auto bytes = wav_bytes(pcm);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(code_of([&] { parse_wav(bad_magic); }) == ErrorCode::kNotWav);
  CHECK(code_of([&] { parse_wav(std::vector<std::uint8_t>(5, 0)); }) == ErrorCode::kNotWav);

  testing::WavSpec stereo;
  stereo.channels = 2;
  CHECK(code_of([&] { parse_wav(wav_bytes(pcm, stereo)); }) == ErrorCode::kUnsupportedFormat);
  testing::WavSpec flt;
  flt.format = 3;
  CHECK(code_of([&] { parse_wav(wav_bytes(pcm, flt)); }) == ErrorCode::kUnsupportedFormat);
  CHECK(code_of([] { load_wav(testing::temp_path("does_not_exist.wav")); }) ==
        ErrorCode::kIoError);
}

TEST_CASE("synth_tones closed form") {
  ToneSpec spec;
  spec.frequencies = {1000.0};
  spec.amplitudes = {1.0};
  spec.duration_s = 0.01;
  spec.phases = std::vector<double>{0.0};
  const Waveform w = synth_tones(spec, 16000);
  CHECK(w.size() == 160);
  CHECK(w.samples()[0] == doctest::Approx(1.0));
  CHECK(std::abs(w.samples()[4]) < 1e-15);
}

TEST_CASE("synth_tones edge cases") {
  ToneSpec empty;
  empty.duration_s = 0.1;
  const Waveform z = synth_tones(empty, 16000);
  CHECK(z.size() == 1600);
  for (double v : z.samples()) CHECK(v == 0.0);

  ToneSpec anti;
  anti.frequencies = {440.0, 440.0};
  anti.amplitudes = {0.5, 0.5};
  anti.duration_s = 0.1;
  anti.phases = std::vector<double>{0.3, 0.3 + std::numbers::pi};
  for (double v : synth_tones(anti, 16000).samples()) CHECK(std::abs(v) < 1e-12);

  ToneSpec aliased;
  aliased.frequencies = {8000.0};
  aliased.amplitudes = {1.0};
  CHECK(code_of([&] { synth_tones(aliased, 16000); }) == ErrorCode::kAliasedFrequency);

  ToneSpec seeded;
  seeded.frequencies = {300.0, 700.0};
  seeded.amplitudes = {1.0, 0.5};
  seeded.duration_s = 0.05;
  seeded.phase_seed = 9;
  CHECK(synth_tones(seeded, 16000) == synth_tones(seeded, 16000));
}

TEST_CASE("add_noise_snr power relations") {
  ToneSpec spec;
  spec.frequencies = {500.0};
  spec.amplitudes = {1.0};
  spec.duration_s = 1.0;
  spec.phases = std::vector<double>{0.0};
  const Waveform x = synth_tones(spec, 16000);
  const double px = mean_power(x.samples());
  CHECK(px == doctest::Approx(0.5).epsilon(1e-6));

  CHECK(add_noise_snr(x, std::numeric_limits<double>::infinity(), 1) == x);

  for (double snr : {0.0, -5.0, 5.0, 20.0}) {
    const Waveform y = add_noise_snr(x, snr, 17);
    std::vector<double> noise(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) noise[i] = y.samples()[i] - x.samples()[i];
    const double pn = mean_power(noise);
    CHECK(pn == doctest::Approx(px * std::pow(10.0, -snr / 10.0)).epsilon(0.02));
    CHECK(std::abs(10.0 * std::log10(px / pn) - snr) < 0.2);
    CHECK(add_noise_snr(x, snr, 17) == y);
  }
  const Waveform silent(std::vector<double>(100, 0.0), 16000);
  CHECK(code_of([&] { add_noise_snr(silent, 0.0, 1); }) == ErrorCode::kSilentInput);
}

TEST_CASE("waveform invariants") {
  CHECK(code_of([] { Waveform(std::vector<double>{}, 16000); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Waveform(std::vector<double>{std::nan("")}, 16000); }) ==
        ErrorCode::kNonFiniteInput);
}

TEST_CASE("rng is reproducible and below() stays in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
  double sum = 0.0, sq = 0.0;
  Rng d(5);
  for (int i = 0; i < 20000; ++i) {
    const double v = d.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / 20000) < 0.03);
  CHECK(sq / 20000 == doctest::Approx(1.0).epsilon(0.03));
}
