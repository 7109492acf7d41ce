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

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "leaf/matrix.hpp"

namespace leaf {

// 2*sqrt(2*ln 2): ratio between FWHM and the standard deviation of a Gaussian.
inline const double kFwhmFactor = 2.0 * std::sqrt(2.0 * std::log(2.0));

struct MelInitConfig {
  int n_filters = 40;
  int sample_rate = 16000;
  double fmin = 60.0;
  double fmax = 7800.0;
  int n_fft = 512;

  void validate() const;
};

// Learnable Gabor filterbank. center_freqs are in cycles/sample, inv_bandwidths
// are Gaussian widths in samples.
struct GaborBank {
  std::vector<double> center_freqs;
  std::vector<double> inv_bandwidths;
  int filter_len = 401;

  std::size_t size() const noexcept { return center_freqs.size(); }
  bool operator==(const GaborBank&) const = default;
};

double hz_to_mel(double hz) noexcept;
double mel_to_hz(double mel) noexcept;

double sigma_lower_bound() noexcept;
double sigma_upper_bound(int filter_len) noexcept;

// Maps a full width at half maximum (normalized frequency) to a Gaussian width
// in samples, sigma = 2*sqrt(2 ln 2) / fwhm, before clamping.
double sigma_from_fwhm(double fwhm) noexcept;

// N x (n_fft/2 + 1) peak-normalized triangular filters spaced on the mel scale.
Matrix mel_matrix(const MelInitConfig& cfg);

// Centers and widths from an arbitrary bank of design-grid rows sampled on a
// grid of grid_size points per unit normalized frequency.
GaborBank gabor_params_from_rows(const Matrix& rows, std::size_t grid_size, int filter_len);
GaborBank gabor_params_from_mels(const MelInitConfig& cfg, int filter_len);

std::vector<std::complex<double>> gabor_impulse_response(const GaborBank& bank, std::size_t n);

struct RealImagPair {
  std::vector<double> real;
  std::vector<double> imag;
};
RealImagPair gabor_real_imag(const GaborBank& bank, std::size_t n);

GaborBank project_constraints(GaborBank bank);

// |DFT_K(filter)|^2 at normalized frequencies k/K.
std::vector<double> frequency_response(std::span<const std::complex<double>> filter,
                                       std::size_t n_points);

}  // namespace leaf
