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

#include "filtering.hpp"

#include <algorithm>

#include "leaf/error.hpp"

namespace leaf::detail {

ComplexFilters complex_filters(const GaborBank& bank) {
  ComplexFilters out;
  out.reserve(bank.size());
  for (std::size_t n = 0; n < bank.size(); ++n) out.push_back(gabor_impulse_response(bank, n));
  return out;
}

ComplexFilters complex_filters(const ConvBank& bank) {
  ComplexFilters out(bank.channels());
  for (std::size_t n = 0; n < bank.channels(); ++n) {
    const auto re = bank.kernels.row(2 * n);
    const auto im = bank.kernels.row(2 * n + 1);
    out[n].resize(bank.filter_len());
    for (std::size_t j = 0; j < bank.filter_len(); ++j) out[n][j] = {re[j], im[j]};
  }
  return out;
}

Correlator::Correlator(const ComplexFilters& filters, std::size_t signal_len)
    : signal_len_(signal_len) {
  if (filters.empty()) fail(ErrorCode::kInvalidArgument, "filterbank is empty");
  filter_len_ = filters.front().size();
  if (filter_len_ % 2 == 0) fail(ErrorCode::kInvalidArgument, "filter length must be odd");
  fft_len_ = fft::fast_length(signal_len_ + filter_len_ - 1);
  spectra_.reserve(filters.size());
  for (const auto& phi : filters) {
    if (phi.size() != filter_len_) {
      fail(ErrorCode::kShapeMismatch, "filters must share one length");
    }
    // Reversed taps turn the correlation into a linear convolution.
    fft::Buffer buf(fft_len_);
    for (std::size_t k = 0; k < filter_len_; ++k) buf[k] = phi[filter_len_ - 1 - k];
    fft::forward(buf);
    spectra_.push_back(std::move(buf));
  }
}

fft::Buffer Correlator::transform_signal(std::span<const double> x) const {
  if (x.size() != signal_len_) fail(ErrorCode::kShapeMismatch, "signal length mismatch");
  fft::Buffer buf(fft_len_);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = {x[i], 0.0};
  fft::forward(buf);
  return buf;
}

void Correlator::channel_output(const fft::Buffer& x_spec, std::size_t n,
                                std::vector<Complex>& y) const {
  fft::Buffer work;
  channel_output(x_spec, n, y, work);
}

void Correlator::channel_output(const fft::Buffer& x_spec, std::size_t n, std::vector<Complex>& y,
                                fft::Buffer& work) const {
  if (work.size() != fft_len_) work = fft::Buffer(fft_len_);
  const auto& spec = spectra_[n];
  for (std::size_t k = 0; k < fft_len_; ++k) work[k] = mul(x_spec[k], spec[k]);
  fft::inverse(work);
  const double scale = 1.0 / static_cast<double>(fft_len_);
  const std::size_t half = (filter_len_ - 1) / 2;
  y.resize(signal_len_);
  for (std::size_t t = 0; t < signal_len_; ++t) y[t] = work[t + half] * scale;
}

Matrix Correlator::squared_modulus(std::span<const double> x) const {
  const auto x_spec = transform_signal(x);
  Matrix out(signal_len_, channels());
  std::vector<Complex> y;
  fft::Buffer work;
  for (std::size_t n = 0; n < channels(); ++n) {
    channel_output(x_spec, n, y, work);
    for (std::size_t t = 0; t < signal_len_; ++t) out(t, n) = fft::squared_magnitude(y[t]);
  }
  return out;
}

std::vector<Complex> Correlator::channel_adjoint(const fft::Buffer& x_spec,
                                                 std::span<const Complex> g,
                                                 fft::Buffer& work) const {
  // c(l) = sum_t g(t) x(t + l) has spectrum X(k) * conj(DFT(conj g)(k)).
  if (work.size() != fft_len_) work = fft::Buffer(fft_len_);
  for (std::size_t t = 0; t < g.size(); ++t) work[t] = std::conj(g[t]);
  std::fill(work.data() + g.size(), work.data() + fft_len_, Complex(0.0, 0.0));
  fft::forward(work);
  for (std::size_t k = 0; k < fft_len_; ++k) work[k] = mul(x_spec[k], std::conj(work[k]));
  fft::inverse(work);
  const double scale = 1.0 / static_cast<double>(fft_len_);
  const std::size_t half = (filter_len_ - 1) / 2;
  std::vector<Complex> out(filter_len_);
  for (std::size_t j = 0; j < filter_len_; ++j) {
    const std::size_t idx = (j + fft_len_ - half) % fft_len_;
    out[j] = work[idx] * scale;
  }
  return out;
}

Matrix pooling_kernels(const PoolingParams& pool, int pool_len) {
  Matrix out(static_cast<std::size_t>(pool_len), pool.widths.size());
  for (std::size_t n = 0; n < pool.widths.size(); ++n) {
    const auto k = gaussian_lowpass_kernel(pool.widths[n], pool_len);
    for (std::size_t j = 0; j < k.size(); ++j) out(j, n) = k[j];
  }
  return out;
}

std::size_t frame_count(std::size_t signal_len, int stride) noexcept {
  const auto s = static_cast<std::size_t>(stride);
  return (signal_len + s - 1) / s;
}

}  // namespace leaf::detail
