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

#include "leaf/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "leaf/error.hpp"
#include "leaf/fft.hpp"

namespace leaf {

void MelInitConfig::validate() const {
  if (n_filters < 1) fail(ErrorCode::kInvalidConfig, "n_filters must be >= 1");
  if (sample_rate <= 0) fail(ErrorCode::kInvalidConfig, "sample_rate must be positive");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    fail(ErrorCode::kInvalidConfig, "need 0 <= fmin < fmax <= sample_rate/2");
  }
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0) {
    fail(ErrorCode::kInvalidConfig, "n_fft must be a power of two");
  }
}

double hz_to_mel(double hz) noexcept { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) noexcept { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double sigma_lower_bound() noexcept { return 2.0 * kFwhmFactor; }
double sigma_upper_bound(int filter_len) noexcept { return filter_len * kFwhmFactor; }

double sigma_from_fwhm(double fwhm) noexcept { return kFwhmFactor / fwhm; }

Matrix mel_matrix(const MelInitConfig& cfg) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(cfg.n_filters);
  const std::size_t bins = static_cast<std::size_t>(cfg.n_fft / 2 + 1);
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;

  std::vector<double> breaks(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) {
    breaks[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                       static_cast<double>(n + 1));
  }
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (std::lround(breaks[i] / bin_hz) == std::lround(breaks[i + 1] / bin_hz)) {
      fail(ErrorCode::kDegenerateTriangle,
           "mel breakpoints " + std::to_string(i) + " and " + std::to_string(i + 1) +
               " fall on the same FFT bin");
    }
  }

  Matrix out(n, bins);
  for (std::size_t r = 0; r < n; ++r) {
    const double lo = breaks[r], mid = breaks[r + 1], hi = breaks[r + 2];
    double peak = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      const double v = std::max(0.0, std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid)));
      out(r, k) = v;
      peak = std::max(peak, v);
    }
    if (peak <= 0.0) {
      fail(ErrorCode::kDegenerateTriangle, "mel row " + std::to_string(r) + " covers no bin");
    }
    for (double& v : out.row(r)) v /= peak;
  }
  return out;
}

GaborBank gabor_params_from_rows(const Matrix& rows, std::size_t grid_size, int filter_len) {
  if (filter_len < 1 || filter_len % 2 == 0) {
    fail(ErrorCode::kInvalidArgument, "filter_len must be odd");
  }
  GaborBank bank;
  bank.filter_len = filter_len;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto row = rows.row(r);
    const auto peak_it = std::max_element(row.begin(), row.end());
    const double peak = *peak_it;
    if (!(peak > 0.0)) fail(ErrorCode::kDegenerateTriangle, "design row has no positive value");
    const auto width = std::count_if(row.begin(), row.end(),
                                     [&](double v) { return v >= 0.5 * peak; });
    const double center = static_cast<double>(peak_it - row.begin()) / grid_size;
    const double fwhm = static_cast<double>(width) / grid_size;
    bank.center_freqs.push_back(center);
    bank.inv_bandwidths.push_back(sigma_from_fwhm(fwhm));
  }
  return project_constraints(std::move(bank));
}

GaborBank gabor_params_from_mels(const MelInitConfig& cfg, int filter_len) {
  return gabor_params_from_rows(mel_matrix(cfg), static_cast<std::size_t>(cfg.n_fft),
                                filter_len);
}

std::vector<std::complex<double>> gabor_impulse_response(const GaborBank& bank,
                                                         std::size_t n) {
  if (n >= bank.size()) fail(ErrorCode::kInvalidArgument, "channel index out of range");
  const double eta = bank.center_freqs[n];
  const double sigma = bank.inv_bandwidths[n];
  const int half = (bank.filter_len - 1) / 2;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(bank.filter_len));
  for (int j = 0; j < bank.filter_len; ++j) {
    const double t = j - half;
    const double envelope = norm * std::exp(-t * t / (2.0 * sigma * sigma));
    const double phase = 2.0 * std::numbers::pi * eta * t;
    out[static_cast<std::size_t>(j)] = {envelope * std::cos(phase), envelope * std::sin(phase)};
  }
  return out;
}

RealImagPair gabor_real_imag(const GaborBank& bank, std::size_t n) {
  const auto h = gabor_impulse_response(bank, n);
  RealImagPair out;
  out.real.reserve(h.size());
  out.imag.reserve(h.size());
  for (const auto& v : h) {
    out.real.push_back(v.real());
    out.imag.push_back(v.imag());
  }
  return out;
}

GaborBank project_constraints(GaborBank bank) {
  const double lo = sigma_lower_bound();
  const double hi = sigma_upper_bound(bank.filter_len);
  for (double& eta : bank.center_freqs) eta = std::clamp(eta, 0.0, 0.5);
  for (double& sigma : bank.inv_bandwidths) sigma = std::clamp(sigma, lo, hi);
  return bank;
}

std::vector<double> frequency_response(std::span<const std::complex<double>> filter,
                                       std::size_t n_points) {
  if (n_points < filter.size() || n_points == 0) {
    fail(ErrorCode::kInvalidArgument, "n_points must be >= filter length");
  }
  fft::Buffer buf(n_points);
  std::copy(filter.begin(), filter.end(), buf.data());
  fft::forward(buf);
  std::vector<double> out(n_points);
  for (std::size_t k = 0; k < n_points; ++k) out[k] = fft::squared_magnitude(buf[k]);
  return out;
}

}  // namespace leaf
