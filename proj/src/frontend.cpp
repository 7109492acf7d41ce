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

#include "leaf/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "filtering.hpp"
#include "leaf/error.hpp"
#include "leaf/fft.hpp"

namespace leaf {

std::string_view to_string(Compression c) noexcept {
  switch (c) {
    case Compression::kLog: return "log";
    case Compression::kPcen: return "pcen";
    case Compression::kSpcen: return "spcen";
  }
  return "?";
}

std::string_view to_string(Filtering f) noexcept {
  switch (f) {
    case Filtering::kGabor: return "gabor";
    case Filtering::kNormalizedConv: return "normalized_conv";
    case Filtering::kMel: return "mel";
  }
  return "?";
}

Compression parse_compression(std::string_view s) {
  if (s == "log") return Compression::kLog;
  if (s == "pcen") return Compression::kPcen;
  if (s == "spcen") return Compression::kSpcen;
  fail(ErrorCode::kInvalidConfig, "unknown compression '" + std::string(s) + "'");
}

Filtering parse_filtering(std::string_view s) {
  if (s == "gabor") return Filtering::kGabor;
  if (s == "normalized_conv") return Filtering::kNormalizedConv;
  if (s == "mel") return Filtering::kMel;
  fail(ErrorCode::kInvalidConfig, "unknown filtering '" + std::string(s) + "'");
}

void FrontendConfig::validate() const {
  if (n_filters < 1) fail(ErrorCode::kInvalidConfig, "n_filters must be >= 1");
  if (filter_len < 1 || filter_len % 2 == 0) {
    fail(ErrorCode::kInvalidConfig, "filter_len must be odd");
  }
  if (pool_len < 1 || pool_len % 2 == 0) fail(ErrorCode::kInvalidConfig, "pool_len must be odd");
  if (pool_stride < 1) fail(ErrorCode::kInvalidConfig, "pool_stride must be >= 1");
  if (sample_rate != kFrontendSampleRate) {
    fail(ErrorCode::kBadRate, "frontends run at 16000 Hz, config says " +
                                  std::to_string(sample_rate));
  }
}

void require_frontend_rate(const Waveform& x, const FrontendConfig& cfg) {
  if (x.sample_rate() != kFrontendSampleRate || x.sample_rate() != cfg.sample_rate) {
    fail(ErrorCode::kBadRate,
         "expected 16000 Hz input, got " + std::to_string(x.sample_rate()) + " Hz");
  }
}

PoolingParams PoolingParams::init(std::size_t n_filters, double width) {
  return PoolingParams{std::vector<double>(n_filters, width)};
}

double pool_width_lower_bound(int pool_len) noexcept { return 2.0 / pool_len; }

PcenParams PcenParams::init(std::size_t n) {
  PcenParams p;
  p.alpha.assign(n, 0.96);
  p.delta.assign(n, 2.0);
  p.root.assign(n, 2.0);
  p.smooth.assign(n, 0.04);
  return p;
}

PcenParams project_pcen(PcenParams p) {
  for (double& v : p.alpha) v = std::clamp(v, 0.0, 1.0);
  for (double& v : p.delta) v = std::max(v, 0.0);
  for (double& v : p.root) v = std::max(v, 1.0);
  for (double& v : p.smooth) v = std::clamp(v, 0.0, 1.0);
  return p;
}

ConvBank ConvBank::from_gabor(const GaborBank& bank) {
  ConvBank out;
  out.kernels = Matrix(2 * bank.size(), static_cast<std::size_t>(bank.filter_len));
  for (std::size_t n = 0; n < bank.size(); ++n) {
    const auto pair = gabor_real_imag(bank, n);
    std::copy(pair.real.begin(), pair.real.end(), out.kernels.row(2 * n).begin());
    std::copy(pair.imag.begin(), pair.imag.end(), out.kernels.row(2 * n + 1).begin());
  }
  return out;
}

ConvBank renormalize_conv(ConvBank bank) {
  for (std::size_t r = 0; r < bank.kernels.rows(); ++r) {
    auto row = bank.kernels.row(r);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    if (!(sq > 0.0)) fail(ErrorCode::kZeroFilter, "kernel " + std::to_string(r) + " is all zero");
    const double norm = std::sqrt(sq);
    for (double& v : row) v /= norm;
  }
  return bank;
}

Matrix filter_squared_modulus(const Waveform& x, const GaborBank& bank) {
  if (x.sample_rate() != kFrontendSampleRate) {
    fail(ErrorCode::kBadRate, "expected 16000 Hz input");
  }
  const detail::Correlator corr(detail::complex_filters(bank), x.size());
  return corr.squared_modulus(x.samples());
}

Matrix filter_squared_modulus(const Waveform& x, const ConvBank& bank) {
  if (x.sample_rate() != kFrontendSampleRate) {
    fail(ErrorCode::kBadRate, "expected 16000 Hz input");
  }
  const detail::Correlator corr(detail::complex_filters(bank), x.size());
  return corr.squared_modulus(x.samples());
}

std::vector<double> gaussian_lowpass_kernel(double width, int pool_len) {
  const int half = (pool_len - 1) / 2;
  const double sigma = width * half;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  std::vector<double> k(static_cast<std::size_t>(pool_len));
  for (int j = 0; j < pool_len; ++j) {
    const double t = j - half;
    k[static_cast<std::size_t>(j)] = norm * std::exp(-t * t / (2.0 * sigma * sigma));
  }
  return k;
}

FeatureMap pool_decimate(const Matrix& f, const PoolingParams& pool, const FrontendConfig& cfg) {
  const std::size_t n_ch = f.cols();
  if (pool.widths.size() != n_ch) {
    fail(ErrorCode::kShapeMismatch, "pooling widths do not match channel count");
  }
  const Matrix kernels = detail::pooling_kernels(pool, cfg.pool_len);
  const auto T = static_cast<long>(f.rows());
  const long half = (cfg.pool_len - 1) / 2;
  const std::size_t M = detail::frame_count(f.rows(), cfg.pool_stride);

  FeatureMap out;
  out.values = Matrix(M, n_ch);
  out.frame_rate = static_cast<double>(cfg.sample_rate) / cfg.pool_stride;
  for (std::size_t m = 0; m < M; ++m) {
    auto dst = out.values.row(m);
    const long center = static_cast<long>(m) * cfg.pool_stride;
    const long j0 = std::max(0L, half - center);
    const long j1 = std::min<long>(cfg.pool_len, T - center + half);
    for (long j = j0; j < j1; ++j) {
      const auto src = f.row(static_cast<std::size_t>(center + j - half));
      const auto k = kernels.row(static_cast<std::size_t>(j));
      for (std::size_t n = 0; n < n_ch; ++n) dst[n] += src[n] * k[n];
    }
  }
  return out;
}

namespace {

void require_non_negative(const FeatureMap& f) {
  for (double v : f.values.values()) {
    if (!(v >= 0.0)) fail(ErrorCode::kNegativeInput, "compression input must be non-negative");
  }
}

}  // namespace

FeatureMap log_compress(FeatureMap f) {
  require_non_negative(f);
  for (double& v : f.values.values()) v = std::log(v + kLogFloor);
  return f;
}

FeatureMap pcen_forward(FeatureMap f, const PcenParams& p) {
  require_non_negative(f);
  const std::size_t M = f.frames(), N = f.channels();
  if (p.size() != N || p.delta.size() != N || p.root.size() != N || p.smooth.size() != N) {
    fail(ErrorCode::kShapeMismatch, "PCEN parameters do not match channel count");
  }
  for (std::size_t n = 0; n < N; ++n) {
    const double s = p.smooth[n];
    const double r = 1.0 / p.root[n];
    const double offset = std::pow(p.delta[n], r);
    double ema = M > 0 ? f.values(0, n) : 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const double v = f.values(m, n);
      if (m > 0) ema = (1.0 - s) * ema + s * v;
      const double base = v / std::pow(p.eps + ema, p.alpha[n]) + p.delta[n];
      f.values(m, n) = std::pow(base, r) - offset;
    }
  }
  return f;
}

FrontendState FrontendState::init(const FrontendConfig& cfg, MelInitConfig mel) {
  cfg.validate();
  mel.n_filters = cfg.n_filters;
  mel.sample_rate = cfg.sample_rate;
  FrontendState s;
  s.mel = mel;
  s.bank = gabor_params_from_mels(mel, cfg.filter_len);
  s.conv = renormalize_conv(ConvBank::from_gabor(s.bank));
  const auto n = static_cast<std::size_t>(cfg.n_filters);
  s.pooling = PoolingParams::init(n);
  for (double& w : s.pooling.widths) {
    w = std::clamp(w, pool_width_lower_bound(cfg.pool_len), kPoolWidthUpperBound);
  }
  s.pcen = PcenParams::init(n);
  return s;
}

FeatureMap mel_power(const Waveform& x, const MelInitConfig& mel, const Matrix& mel_rows,
                     int hop) {
  if (x.sample_rate() != mel.sample_rate || x.sample_rate() != kFrontendSampleRate) {
    fail(ErrorCode::kBadRate, "expected 16000 Hz input, got " +
                                  std::to_string(x.sample_rate()) + " Hz");
  }
  if (mel.n_fft < kMelWindow) fail(ErrorCode::kInvalidConfig, "n_fft must be >= 400");
  if (hop < 1) fail(ErrorCode::kInvalidConfig, "hop must be >= 1");
  const auto samples = x.samples();
  const auto T = static_cast<long>(samples.size());
  const std::size_t M = detail::frame_count(samples.size(), hop);
  const std::size_t n_fft = static_cast<std::size_t>(mel.n_fft);
  const std::size_t bins = n_fft / 2 + 1;
  const std::size_t offset = (n_fft - kMelWindow) / 2;
  const long half = kMelWindow / 2;

  std::vector<double> window(kMelWindow);
  for (int j = 0; j < kMelWindow; ++j) {
    window[static_cast<std::size_t>(j)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * j / kMelWindow);
  }

  FeatureMap out;
  out.values = Matrix(M, mel_rows.rows());
  out.frame_rate = static_cast<double>(x.sample_rate()) / hop;
  fft::Buffer buf(n_fft);
  std::vector<double> power(bins);
  for (std::size_t m = 0; m < M; ++m) {
    buf.zero();
    const long start = static_cast<long>(m) * hop - half;
    for (long j = 0; j < kMelWindow; ++j) {
      const long i = start + j;
      if (i >= 0 && i < T) {
        buf[offset + static_cast<std::size_t>(j)] = {samples[static_cast<std::size_t>(i)] *
                                                         window[static_cast<std::size_t>(j)],
                                                     0.0};
      }
    }
    fft::forward(buf);
    for (std::size_t k = 0; k < bins; ++k) power[k] = fft::squared_magnitude(buf[k]);
    for (std::size_t n = 0; n < mel_rows.rows(); ++n) {
      const auto w = mel_rows.row(n);
      double acc = 0.0;
      for (std::size_t k = 0; k < bins; ++k) acc += w[k] * power[k];
      out.values(m, n) = acc;
    }
  }
  return out;
}

FeatureMap mel_frontend_forward(const Waveform& x, const MelInitConfig& mel,
                                Compression compression, const PcenParams& pcen, int hop) {
  auto power = mel_power(x, mel, mel_matrix(mel), hop);
  if (compression == Compression::kLog) return log_compress(std::move(power));
  return pcen_forward(std::move(power), pcen);
}

FeatureMap frontend_precompression(const Waveform& x, const FrontendState& state,
                                   const FrontendConfig& cfg) {
  cfg.validate();
  require_frontend_rate(x, cfg);
  switch (cfg.filtering) {
    case Filtering::kMel:
      return mel_power(x, state.mel, mel_matrix(state.mel), cfg.pool_stride);
    case Filtering::kGabor:
      return pool_decimate(filter_squared_modulus(x, state.bank), state.pooling, cfg);
    case Filtering::kNormalizedConv:
      return pool_decimate(filter_squared_modulus(x, state.conv), state.pooling, cfg);
  }
  fail(ErrorCode::kInternal, "unhandled filtering variant");
}

FeatureMap frontend_forward(const Waveform& x, const FrontendState& state,
                            const FrontendConfig& cfg) {
  auto pre = frontend_precompression(x, state, cfg);
  if (cfg.compression == Compression::kLog) return log_compress(std::move(pre));
  return pcen_forward(std::move(pre), state.pcen);
}

std::size_t param_count(const FrontendConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.n_filters);
  const auto w = static_cast<std::size_t>(cfg.filter_len);
  std::size_t filtering = 0;
  std::size_t pooling = n;
  switch (cfg.filtering) {
    case Filtering::kGabor: filtering = 2 * n; break;
    case Filtering::kNormalizedConv: filtering = 2 * n * w; break;
    case Filtering::kMel: pooling = 0; break;
  }
  std::size_t compression = 0;
  switch (cfg.compression) {
    case Compression::kLog: compression = 0; break;
    case Compression::kPcen: compression = 3 * n; break;
    case Compression::kSpcen: compression = 4 * n; break;
  }
  return filtering + pooling + compression;
}

std::vector<double> channel_correlations(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) fail(ErrorCode::kShapeMismatch, "channel counts differ");
  const std::size_t M = std::min(a.rows(), b.rows()), N = a.cols();
  std::vector<double> out(N, 0.0);
  if (M == 0) return out;
  for (std::size_t n = 0; n < N; ++n) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      ma += a(m, n);
      mb += b(m, n);
    }
    ma /= static_cast<double>(M);
    mb /= static_cast<double>(M);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const double da = a(m, n) - ma, db = b(m, n) - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
    if (saa > 0.0 && sbb > 0.0) out[n] = sab / std::sqrt(saa * sbb);
  }
  return out;
}

std::vector<double> mel_equivalence(const Waveform& x, const FrontendConfig& cfg,
                                    const MelInitConfig& mel) {
  FrontendConfig leaf_cfg = cfg;
  leaf_cfg.filtering = Filtering::kGabor;
  FrontendConfig mel_cfg = cfg;
  mel_cfg.filtering = Filtering::kMel;
  const auto state = FrontendState::init(leaf_cfg, mel);
  return channel_correlations(frontend_precompression(x, state, leaf_cfg).values,
                              frontend_precompression(x, state, mel_cfg).values);
}

}  // namespace leaf
