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

#include "leaf/signal.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "leaf/error.hpp"
#include "leaf/rng.hpp"

namespace leaf {
namespace {

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 |
         static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  for (int i = 0; i < 4; ++i) {
    if (b[at + i] != static_cast<std::uint8_t>(tag[i])) return false;
  }
  return true;
}

}  // namespace

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty()) fail(ErrorCode::kInvalidArgument, "waveform is empty");
  if (sample_rate_ <= 0) fail(ErrorCode::kBadRate, "sample rate must be positive");
  for (double v : samples_) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFiniteInput, "waveform has non-finite samples");
  }
}

Waveform parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    fail(ErrorCode::kNotWav, "missing RIFF/WAVE magic");
  }
  bool have_fmt = false;
  int rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16 || body + 16 > bytes.size()) {
        fail(ErrorCode::kNotWav, "truncated fmt chunk");
      }
      const std::uint16_t format = read_u16(bytes, body);
      const std::uint16_t channels = read_u16(bytes, body + 2);
      rate = static_cast<int>(read_u32(bytes, body + 4));
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (format != 1 || bits != 16) {
        fail(ErrorCode::kUnsupportedFormat,
             "only PCM 16-bit is supported (format " + std::to_string(format) +
                 ", " + std::to_string(bits) + " bits)");
      }
      if (channels != 1) {
        fail(ErrorCode::kUnsupportedFormat,
             "only mono is supported (" + std::to_string(channels) + " channels)");
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) fail(ErrorCode::kNotWav, "data chunk before fmt chunk");
      // Streaming writers leave the size at 0xFFFFFFFF; take what is present.
      const std::size_t available = bytes.size() - body;
      const std::size_t n_bytes = std::min<std::size_t>(chunk_size, available);
      const std::size_t n = n_bytes / 2;
      std::vector<double> samples(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
        samples[i] = static_cast<double>(v) / 32768.0;
      }
      if (samples.empty()) fail(ErrorCode::kNotWav, "data chunk is empty");
      return Waveform(std::move(samples), rate);
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  fail(ErrorCode::kNotWav, have_fmt ? "no data chunk" : "no fmt chunk");
}

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

Waveform synth_tones(const ToneSpec& spec, int rate) {
  if (rate <= 0) fail(ErrorCode::kBadRate, "sample rate must be positive");
  if (spec.frequencies.size() != spec.amplitudes.size()) {
    fail(ErrorCode::kInvalidArgument, "frequencies and amplitudes differ in length");
  }
  if (spec.phases && spec.phases->size() != spec.frequencies.size()) {
    fail(ErrorCode::kInvalidArgument, "phases and frequencies differ in length");
  }
  for (double f : spec.frequencies) {
    if (!(f < rate / 2.0)) {
      fail(ErrorCode::kAliasedFrequency,
           "tone at " + std::to_string(f) + " Hz is at or above Nyquist");
    }
    if (!(f > 0.0)) fail(ErrorCode::kInvalidArgument, "tone frequency must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * rate));

  std::vector<double> phases;
  if (spec.phases) {
    phases = *spec.phases;
  } else {
    Rng rng(spec.phase_seed);
    for (std::size_t k = 0; k < spec.frequencies.size(); ++k) {
      phases.push_back(2.0 * std::numbers::pi * rng.uniform());
    }
  }

  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < spec.frequencies.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * spec.frequencies[k] / rate;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += spec.amplitudes[k] * std::cos(w * static_cast<double>(i) + phases[k]);
    }
  }
  return Waveform(std::move(out), rate);
}

double mean_power(std::span<const double> x) noexcept {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

Waveform add_noise_snr(const Waveform& x, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return x;
  if (!std::isfinite(snr_db)) fail(ErrorCode::kInvalidArgument, "snr_db must be finite or +inf");
  const double px = mean_power(x.samples());
  if (px == 0.0) fail(ErrorCode::kSilentInput, "cannot set an SNR on a silent input");

  Rng rng(seed);
  std::vector<double> noise(x.size());
  for (double& v : noise) v = rng.normal();
  const double pn = mean_power(noise);
  const double gain = std::sqrt(px / (pn * std::pow(10.0, snr_db / 10.0)));

  std::vector<double> out(x.samples().begin(), x.samples().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += gain * noise[i];
  return Waveform(std::move(out), x.sample_rate());
}

}  // namespace leaf
