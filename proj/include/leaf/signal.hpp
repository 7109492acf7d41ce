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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace leaf {

inline constexpr int kFrontendSampleRate = 16000;

// Mono audio. Construction validates that the clip is non-empty and finite;
// the 16 kHz requirement is enforced by the frontends, not here.
class Waveform {
 public:
  Waveform(std::vector<double> samples, int sample_rate);

  std::span<const double> samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  bool operator==(const Waveform&) const = default;

 private:
  std::vector<double> samples_;
  int sample_rate_;
};

struct ToneSpec {
  std::vector<double> frequencies;  // Hz
  std::vector<double> amplitudes;
  double duration_s = 1.0;
  std::uint64_t phase_seed = 0;
  // When set, used verbatim (radians) instead of seeded phases.
  std::optional<std::vector<double>> phases;
};

// Reads a RIFF/WAVE PCM16 mono file. Samples are scaled by 1/32768.
Waveform load_wav(const std::filesystem::path& path);
Waveform parse_wav(std::span<const std::uint8_t> bytes);

Waveform synth_tones(const ToneSpec& spec, int rate);

// Adds seeded Gaussian noise so that the clip-level SNR equals snr_db exactly
// (noise gain is computed from the realized noise power). +inf is a no-op.
Waveform add_noise_snr(const Waveform& x, double snr_db, std::uint64_t seed);

double mean_power(std::span<const double> x) noexcept;

}  // namespace leaf
