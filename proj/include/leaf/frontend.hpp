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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "leaf/gabor.hpp"
#include "leaf/matrix.hpp"
#include "leaf/signal.hpp"

namespace leaf {

enum class Compression { kLog, kPcen, kSpcen };
enum class Filtering { kGabor, kNormalizedConv, kMel };

std::string_view to_string(Compression c) noexcept;
std::string_view to_string(Filtering f) noexcept;
Compression parse_compression(std::string_view s);
Filtering parse_filtering(std::string_view s);

struct FrontendConfig {
  int n_filters = 40;
  int filter_len = 401;
  int pool_len = 401;
  int pool_stride = 160;
  Compression compression = Compression::kSpcen;
  Filtering filtering = Filtering::kGabor;
  int sample_rate = kFrontendSampleRate;

  void validate() const;
  bool operator==(const FrontendConfig&) const = default;
};

struct PoolingParams {
  std::vector<double> widths;  // fraction of the half pooling window

  static PoolingParams init(std::size_t n_filters, double width = 0.4);
};

double pool_width_lower_bound(int pool_len) noexcept;
inline constexpr double kPoolWidthUpperBound = 0.5;

struct PcenParams {
  std::vector<double> alpha;
  std::vector<double> delta;
  std::vector<double> root;    // applied exponent is 1/root
  std::vector<double> smooth;
  double eps = 1e-6;

  static PcenParams init(std::size_t n_filters);
  std::size_t size() const noexcept { return alpha.size(); }
};

// Clamps every PCEN parameter into its valid range.
PcenParams project_pcen(PcenParams p);

struct FeatureMap {
  Matrix values;  // M x N, time-major
  double frame_rate = 0.0;

  std::size_t frames() const noexcept { return values.rows(); }
  std::size_t channels() const noexcept { return values.cols(); }
};

// 2N real kernels; rows 2n and 2n+1 are the real and imaginary parts of
// complex filter n.
struct ConvBank {
  Matrix kernels;

  static ConvBank from_gabor(const GaborBank& bank);
  std::size_t channels() const noexcept { return kernels.rows() / 2; }
  std::size_t filter_len() const noexcept { return kernels.cols(); }
};

ConvBank renormalize_conv(ConvBank bank);

// T x N squared modulus of the complex filterbank output at input rate.
// Cross-correlation with (W-1)/2 zeros of padding on both sides.
Matrix filter_squared_modulus(const Waveform& x, const GaborBank& bank);
Matrix filter_squared_modulus(const Waveform& x, const ConvBank& bank);

std::vector<double> gaussian_lowpass_kernel(double width, int pool_len);

// Depthwise Gaussian lowpass then decimation by pool_stride from index 0.
FeatureMap pool_decimate(const Matrix& f, const PoolingParams& pool, const FrontendConfig& cfg);

inline constexpr double kLogFloor = 1e-6;
FeatureMap log_compress(FeatureMap f);
FeatureMap pcen_forward(FeatureMap f, const PcenParams& p);

// Everything a frontend variant needs besides its config. Unused members are
// still populated (initial values) so any variant can be built from a state.
struct FrontendState {
  GaborBank bank;
  ConvBank conv;
  PoolingParams pooling;
  PcenParams pcen;
  MelInitConfig mel;

  static FrontendState init(const FrontendConfig& cfg, MelInitConfig mel = {});
};

inline constexpr int kMelWindow = 400;

// STFT power (periodic Hann of 400 samples, centered zero-padded frames,
// FFT size mel.n_fft) projected onto mel_matrix rows. No compression.
FeatureMap mel_power(const Waveform& x, const MelInitConfig& mel, const Matrix& mel_rows,
                     int hop);
FeatureMap mel_frontend_forward(const Waveform& x, const MelInitConfig& mel,
                                Compression compression, const PcenParams& pcen,
                                int hop = 160);

// Features before compression for any filtering variant.
FeatureMap frontend_precompression(const Waveform& x, const FrontendState& state,
                                   const FrontendConfig& cfg);
FeatureMap frontend_forward(const Waveform& x, const FrontendState& state,
                            const FrontendConfig& cfg);

std::size_t param_count(const FrontendConfig& cfg);

// Pearson correlation of each column over the first min(rows) frames. A
// constant column yields 0.
std::vector<double> channel_correlations(const Matrix& a, const Matrix& b);

// Correlations between pre-compression Gabor features at initialization and
// mel-filterbank power for the same input and channel count.
std::vector<double> mel_equivalence(const Waveform& x, const FrontendConfig& cfg,
                                    const MelInitConfig& mel = {});

void require_frontend_rate(const Waveform& x, const FrontendConfig& cfg);

}  // namespace leaf
