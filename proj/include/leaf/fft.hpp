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
#include <cstddef>
#include <span>

namespace leaf::fft {

using Complex = std::complex<double>;

// re^2 + im^2 without the hypot round trip std::norm takes for doubles.
inline double squared_magnitude(const Complex& z) noexcept {
  return z.real() * z.real() + z.imag() * z.imag();
}

// Heap buffer aligned for FFTW's SIMD kernels. Every transform in the library
// runs on these buffers so that FFTW picks the same codelets on every call,
// which keeps results bit-reproducible.
class Buffer {
 public:
  Buffer() = default;
  explicit Buffer(std::size_t n);
  ~Buffer();
  Buffer(const Buffer& other);
  Buffer& operator=(const Buffer& other);
  Buffer(Buffer&& other) noexcept;
  Buffer& operator=(Buffer&& other) noexcept;

  Complex* data() noexcept { return data_; }
  const Complex* data() const noexcept { return data_; }
  std::size_t size() const noexcept { return size_; }
  Complex& operator[](std::size_t i) noexcept { return data_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return data_[i]; }
  std::span<Complex> span() noexcept { return {data_, size_}; }
  std::span<const Complex> span() const noexcept { return {data_, size_}; }
  void zero() noexcept;

 private:
  Complex* data_ = nullptr;
  std::size_t size_ = 0;
};

// In-place unnormalized DFTs of buf.size() points. Forward uses e^{-2 pi i kn/N}.
void forward(Buffer& buf);
void inverse(Buffer& buf);

// Smallest length >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t fast_length(std::size_t n);

}  // namespace leaf::fft
