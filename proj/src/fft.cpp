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

#include "leaf/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <new>
#include <utility>

namespace leaf::fft {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Plans are created once per length and never destroyed. The FFTW planner is
// not thread-safe; execution of an existing plan is.
const PlanPair& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Buffer scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair pair;
  pair.forward = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  pair.inverse = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, pair).first->second;
}

}  // namespace

Buffer::Buffer(std::size_t n) : size_(n) {
  if (n == 0) return;
  data_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(Complex) * n));
  if (data_ == nullptr) throw std::bad_alloc();
  zero();
}

Buffer::~Buffer() {
  if (data_ != nullptr) fftw_free(data_);
}

Buffer::Buffer(const Buffer& other) : Buffer(other.size_) {
  std::copy_n(other.data_, size_, data_);
}

Buffer& Buffer::operator=(const Buffer& other) {
  if (this != &other) {
    Buffer copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Buffer::Buffer(Buffer&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)) {}

Buffer& Buffer::operator=(Buffer&& other) noexcept {
  if (this != &other) {
    if (data_ != nullptr) fftw_free(data_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

void Buffer::zero() noexcept { std::fill_n(data_, size_, Complex(0.0, 0.0)); }

void forward(Buffer& buf) {
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plans_for(buf.size()).forward, p, p);
}

void inverse(Buffer& buf) {
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plans_for(buf.size()).inverse, p, p);
}

std::size_t fast_length(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace leaf::fft
