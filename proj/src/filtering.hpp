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

#include <complex>
#include <span>
#include <vector>

#include "leaf/fft.hpp"
#include "leaf/frontend.hpp"
#include "leaf/matrix.hpp"

namespace leaf::detail {

using Complex = std::complex<double>;
using ComplexFilters = std::vector<std::vector<Complex>>;

inline Complex mul(const Complex& a, const Complex& b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

ComplexFilters complex_filters(const GaborBank& bank);
ComplexFilters complex_filters(const ConvBank& bank);

// FFT implementation of y_n(t) = sum_j x(t + j - h) phi_n(j) for a fixed
// signal length, with h = (W-1)/2 and zero padding outside the signal.
class Correlator {
 public:
  Correlator(const ComplexFilters& filters, std::size_t signal_len);

  std::size_t channels() const noexcept { return spectra_.size(); }
  std::size_t signal_len() const noexcept { return signal_len_; }

  fft::Buffer transform_signal(std::span<const double> x) const;

  // Complex output of channel n given the transformed signal. work is
  // scratch space of any size; it is resized as needed.
  void channel_output(const fft::Buffer& x_spec, std::size_t n, std::vector<Complex>& y,
                      fft::Buffer& work) const;
  void channel_output(const fft::Buffer& x_spec, std::size_t n, std::vector<Complex>& y) const;

  // T x N matrix of |y_n(t)|^2.
  Matrix squared_modulus(std::span<const double> x) const;

  // Adjoint of channel n: given g(t) = dL/dRe y + i dL/dIm y, returns
  // dL/dRe phi + i dL/dIm phi over the W taps.
  std::vector<Complex> channel_adjoint(const fft::Buffer& x_spec, std::span<const Complex> g,
                                       fft::Buffer& work) const;

 private:
  std::size_t signal_len_;
  std::size_t filter_len_;
  std::size_t fft_len_;
  std::vector<fft::Buffer> spectra_;
};

// Pooling kernels laid out pool_len x N so the innermost loop runs over channels.
Matrix pooling_kernels(const PoolingParams& pool, int pool_len);

std::size_t frame_count(std::size_t signal_len, int stride) noexcept;

}  // namespace leaf::detail
