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

#include "leaf/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "filtering.hpp"
#include "leaf/error.hpp"
#include "leaf/rng.hpp"

namespace leaf {
namespace {

using detail::Complex;

struct GradAccum {
  std::vector<double> eta, sigma, pool, alpha, delta, root, smooth, conv;
  std::vector<Matrix> head_w;
  std::vector<std::vector<double>> head_b;

  explicit GradAccum(const Model& m) {
    const std::size_t n = m.channels();
    eta.assign(n, 0.0);
    sigma.assign(n, 0.0);
    pool.assign(n, 0.0);
    alpha.assign(n, 0.0);
    delta.assign(n, 0.0);
    root.assign(n, 0.0);
    smooth.assign(n, 0.0);
    conv.assign(m.state.conv.kernels.size(), 0.0);
    for (const auto& h : m.heads) {
      head_w.emplace_back(h.weights.rows(), h.weights.cols());
      head_b.emplace_back(h.bias.size(), 0.0);
    }
  }

  Gradients to_params(const Model& m) const {
    Gradients g = m.parameters().zeros_like();
    const auto put = [&](const char* key, const std::vector<double>& v) {
      if (g.contains(key)) g.at(key) = v;
    };
    put(keys::kEta, eta);
    put(keys::kSigma, sigma);
    put(keys::kPoolWidths, pool);
    put(keys::kPcenAlpha, alpha);
    put(keys::kPcenDelta, delta);
    put(keys::kPcenRoot, root);
    put(keys::kPcenSmooth, smooth);
    put(keys::kConvKernels, conv);
    for (std::size_t k = 0; k < head_w.size(); ++k) {
      g.at(head_weights_key(k)) = head_w[k].values();
      g.at(head_bias_key(k)) = head_b[k];
    }
    return g;
  }
};

// Shared, read-only state for one evaluation over a batch.
class Context {
 public:
  explicit Context(const Model& model) : model_(model) {
    const auto& cfg = model.config;
    cfg.validate();
    switch (cfg.filtering) {
      case Filtering::kGabor: filters_ = detail::complex_filters(model.state.bank); break;
      case Filtering::kNormalizedConv: filters_ = detail::complex_filters(model.state.conv); break;
      case Filtering::kMel: mel_rows_ = mel_matrix(model.state.mel); break;
    }
    if (cfg.filtering != Filtering::kMel) {
      kernels_ = detail::pooling_kernels(model.state.pooling, cfg.pool_len);
      kernel_dw_ = Matrix(kernels_.rows(), kernels_.cols());
      const double half = (cfg.pool_len - 1) / 2;
      for (std::size_t n = 0; n < kernels_.cols(); ++n) {
        const double s = model.state.pooling.widths[n] * half;
        for (std::size_t j = 0; j < kernels_.rows(); ++j) {
          const double t = static_cast<double>(j) - half;
          kernel_dw_(j, n) = kernels_(j, n) * (t * t / (s * s * s) - 1.0 / s) * half;
        }
      }
    }
  }

  const Model& model() const noexcept { return model_; }
  const Matrix& kernels() const noexcept { return kernels_; }
  const Matrix& kernel_dw() const noexcept { return kernel_dw_; }
  const Matrix& mel_rows() const noexcept { return mel_rows_; }

  const detail::Correlator& correlator(std::size_t len) {
    auto it = correlators_.find(len);
    if (it == correlators_.end()) {
      it = correlators_.emplace(len, std::make_unique<detail::Correlator>(filters_, len)).first;
    }
    return *it->second;
  }

 private:
  const Model& model_;
  detail::ComplexFilters filters_;
  Matrix kernels_, kernel_dw_, mel_rows_;
  std::map<std::size_t, std::unique_ptr<detail::Correlator>> correlators_;
};

struct FilterTrace {
  fft::Buffer x_spec;
  fft::Buffer work;
  std::vector<std::vector<Complex>> y;  // N x T
  Matrix f;                             // N x T, channel-major
};

// Gaussian "same" correlation of each channel-major row of f, sampled every
// stride samples. Returns M x N.
Matrix pool_forward(const Matrix& f, const Matrix& kernels, int stride) {
  const std::size_t N = f.rows();
  const auto T = static_cast<long>(f.cols());
  const long P = static_cast<long>(kernels.rows());
  const long half = (P - 1) / 2;
  const std::size_t M = detail::frame_count(f.cols(), stride);
  Matrix out(M, N);
  std::vector<double> k(static_cast<std::size_t>(P));
  for (std::size_t n = 0; n < N; ++n) {
    for (long j = 0; j < P; ++j) k[static_cast<std::size_t>(j)] = kernels(static_cast<std::size_t>(j), n);
    const auto row = f.row(n);
    for (std::size_t m = 0; m < M; ++m) {
      const long c = static_cast<long>(m) * stride;
      const long lo = std::max(0L, half - c), hi = std::min(P, T - c + half);
      double acc = 0.0;
      for (long j = lo; j < hi; ++j) {
        acc += row[static_cast<std::size_t>(c + j - half)] * k[static_cast<std::size_t>(j)];
      }
      out(m, n) = acc;
    }
  }
  return out;
}

Matrix precompression(Context& ctx, const Waveform& x, FilterTrace* trace) {
  const auto& cfg = ctx.model().config;
  require_frontend_rate(x, cfg);
  if (cfg.filtering == Filtering::kMel) {
    return mel_power(x, ctx.model().state.mel, ctx.mel_rows(), cfg.pool_stride).values;
  }
  const auto& corr = ctx.correlator(x.size());
  const std::size_t T = x.size(), N = corr.channels();
  FilterTrace local;
  FilterTrace& tr = trace != nullptr ? *trace : local;
  tr.x_spec = corr.transform_signal(x.samples());
  tr.f = Matrix(N, T);
  tr.y.resize(trace != nullptr ? N : 1);
  for (std::size_t n = 0; n < N; ++n) {
    auto& y = tr.y[trace != nullptr ? n : 0];
    corr.channel_output(tr.x_spec, n, y, tr.work);
    auto dst = tr.f.row(n);
    for (std::size_t t = 0; t < T; ++t) dst[t] = fft::squared_magnitude(y[t]);
  }
  return pool_forward(tr.f, ctx.kernels(), cfg.pool_stride);
}

Matrix compress(const Matrix& pre, const Model& model) {
  FeatureMap fm{pre, 0.0};
  if (model.config.compression == Compression::kLog) return log_compress(std::move(fm)).values;
  return pcen_forward(std::move(fm), model.state.pcen).values;
}

// Returns dL/dP given dL/dC for the compression stage.
Matrix compress_backward(const Matrix& pre, const Matrix& d_out, const Model& model,
                         GradAccum& acc) {
  const std::size_t M = pre.rows(), N = pre.cols();
  Matrix d_pre(M, N);
  if (model.config.compression == Compression::kLog) {
    for (std::size_t i = 0; i < pre.size(); ++i) {
      d_pre.values()[i] = d_out.values()[i] / (pre.values()[i] + kLogFloor);
    }
    return d_pre;
  }
  const auto& p = model.state.pcen;
  std::vector<double> ema(M);
  for (std::size_t n = 0; n < N; ++n) {
    const double s = p.smooth[n], a = p.alpha[n], d = p.delta[n], rho = p.root[n];
    const double r = 1.0 / rho;
    for (std::size_t m = 0; m < M; ++m) {
      ema[m] = m == 0 ? pre(0, n) : (1.0 - s) * ema[m - 1] + s * pre(m, n);
    }
    // d(delta^r)/d(delta) and d(delta^r)/dr, with the delta = 0 limits taken as 0.
    const double off_dd = d > 0.0 ? r * std::pow(d, r - 1.0) : 0.0;
    const double off_dr = d > 0.0 ? std::pow(d, r) * std::log(d) : 0.0;
    double carry = 0.0;
    double g_alpha = 0.0, g_delta = 0.0, g_r = 0.0, g_s = 0.0;
    for (std::size_t mm = M; mm-- > 0;) {
      const double g = d_out(mm, n);
      const double v = pre(mm, n);
      const double D = p.eps + ema[mm];
      const double Da = std::pow(D, a);
      const double q = v / Da;
      const double base = q + d;
      double dbase = 0.0;
      if (base > 0.0) {
        dbase = g * r * std::pow(base, r - 1.0);
        g_r += g * std::pow(base, r) * std::log(base);
      }
      g_r -= g * off_dr;
      g_delta += dbase - g * off_dd;
      g_alpha += dbase * (-q * std::log(D));
      d_pre(mm, n) += dbase / Da;
      const double g_ema = dbase * (-a * q / D) + carry;
      if (mm > 0) {
        d_pre(mm, n) += s * g_ema;
        g_s += g_ema * (v - ema[mm - 1]);
        carry = (1.0 - s) * g_ema;
      } else {
        d_pre(0, n) += g_ema;
      }
    }
    acc.alpha[n] += g_alpha;
    acc.delta[n] += g_delta;
    acc.root[n] += g_r * (-1.0 / (rho * rho));
    acc.smooth[n] += g_s;
  }
  return d_pre;
}

// Backward through pooling (into channel-major df) and the pooling widths.
Matrix pool_backward(const Matrix& f, const Matrix& d_pool, const Context& ctx, int stride,
                     GradAccum& acc) {
  const std::size_t N = f.rows();
  const auto T = static_cast<long>(f.cols());
  const auto& kernels = ctx.kernels();
  const auto& kdw = ctx.kernel_dw();
  const long P = static_cast<long>(kernels.rows());
  const long half = (P - 1) / 2;
  Matrix df(N, f.cols());
  std::vector<double> k(static_cast<std::size_t>(P)), kd(static_cast<std::size_t>(P));
  for (std::size_t n = 0; n < N; ++n) {
    for (long j = 0; j < P; ++j) {
      k[static_cast<std::size_t>(j)] = kernels(static_cast<std::size_t>(j), n);
      kd[static_cast<std::size_t>(j)] = kdw(static_cast<std::size_t>(j), n);
    }
    const auto src = f.row(n);
    auto dst = df.row(n);
    double dw = 0.0;
    for (std::size_t m = 0; m < d_pool.rows(); ++m) {
      const double g = d_pool(m, n);
      const long c = static_cast<long>(m) * stride;
      const long lo = std::max(0L, half - c), hi = std::min(P, T - c + half);
      double dot = 0.0;
      for (long j = lo; j < hi; ++j) {
        const auto t = static_cast<std::size_t>(c + j - half);
        dst[t] += g * k[static_cast<std::size_t>(j)];
        dot += src[t] * kd[static_cast<std::size_t>(j)];
      }
      dw += g * dot;
    }
    acc.pool[n] += dw;
  }
  return df;
}

void filter_backward(Context& ctx, const Waveform& x, FilterTrace& tr, const Matrix& df,
                     GradAccum& acc) {
  const auto& model = ctx.model();
  const auto& corr = ctx.correlator(x.size());
  const std::size_t T = x.size(), N = corr.channels();
  std::vector<Complex> g(T);
  for (std::size_t n = 0; n < N; ++n) {
    const auto d = df.row(n);
    for (std::size_t t = 0; t < T; ++t) g[t] = 2.0 * d[t] * tr.y[n][t];
    const auto dphi = corr.channel_adjoint(tr.x_spec, g, tr.work);
    const std::size_t W = dphi.size();
    if (model.config.filtering == Filtering::kNormalizedConv) {
      for (std::size_t j = 0; j < W; ++j) {
        acc.conv[(2 * n) * W + j] += dphi[j].real();
        acc.conv[(2 * n + 1) * W + j] += dphi[j].imag();
      }
      continue;
    }
    const double eta = model.state.bank.center_freqs[n];
    const double sigma = model.state.bank.inv_bandwidths[n];
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    const double half = static_cast<double>(W - 1) / 2.0;
    double g_eta = 0.0, g_sigma = 0.0;
    for (std::size_t j = 0; j < W; ++j) {
      const double t = static_cast<double>(j) - half;
      const double env = norm * std::exp(-t * t / (2.0 * sigma * sigma));
      const double th = 2.0 * std::numbers::pi * eta * t;
      const double c = std::cos(th), s = std::sin(th);
      const double a = dphi[j].real(), b = dphi[j].imag();
      g_eta += (-a * s + b * c) * env * 2.0 * std::numbers::pi * t;
      g_sigma += (a * c + b * s) * env * (t * t / (sigma * sigma * sigma) - 1.0 / sigma);
    }
    acc.eta[n] += g_eta;
    acc.sigma[n] += g_sigma;
  }
}

std::vector<double> time_average(const Matrix& c) {
  std::vector<double> z(c.cols(), 0.0);
  for (std::size_t m = 0; m < c.rows(); ++m) {
    const auto r = c.row(m);
    for (std::size_t n = 0; n < z.size(); ++n) z[n] += r[n];
  }
  for (double& v : z) v /= static_cast<double>(c.rows());
  return z;
}

std::vector<double> head_logits(const Head& head, std::span<const double> z) {
  std::vector<double> logits = head.bias;
  for (std::size_t n = 0; n < z.size(); ++n) {
    const auto w = head.weights.row(n);
    for (std::size_t c = 0; c < logits.size(); ++c) logits[c] += z[n] * w[c];
  }
  return logits;
}

const Head& head_for(const Model& model, const Example& ex) {
  if (ex.task < 0 || static_cast<std::size_t>(ex.task) >= model.heads.size()) {
    fail(ErrorCode::kUnknownTask, "task id " + std::to_string(ex.task) + " has no head");
  }
  const Head& h = model.heads[static_cast<std::size_t>(ex.task)];
  if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= h.num_classes()) {
    fail(ErrorCode::kInvalidArgument, "label " + std::to_string(ex.label) + " out of range");
  }
  return h;
}

struct PassResult {
  double loss = 0.0;
  int prediction = 0;
};

// Cross-entropy of one example; accumulates weight * gradient when acc is set.
PassResult example_pass(Context& ctx, const Example& ex, double weight, GradAccum* acc,
                        GradScope scope = GradScope::kAll) {
  const Model& model = ctx.model();
  const Head& head = head_for(model, ex);
  FilterTrace trace;
  const bool filtered = model.config.filtering != Filtering::kMel;
  const bool deep = acc != nullptr && scope == GradScope::kAll;
  const Matrix pre = precompression(ctx, ex.wave, deep && filtered ? &trace : nullptr);
  const Matrix comp = compress(pre, model);
  const auto z = time_average(comp);
  const auto logits = head_logits(head, z);

  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - mx);
  const double log_norm = mx + std::log(sum);
  const PassResult result{
      log_norm - logits[static_cast<std::size_t>(ex.label)],
      static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin())};
  if (acc == nullptr) return result;

  const std::size_t C = logits.size(), N = z.size(), M = comp.rows();
  std::vector<double> dlogit(C);
  for (std::size_t c = 0; c < C; ++c) {
    dlogit[c] = weight * (std::exp(logits[c] - log_norm) - (c == static_cast<std::size_t>(ex.label)));
  }
  const auto k = static_cast<std::size_t>(ex.task);
  std::vector<double> dz(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const auto w = head.weights.row(n);
    auto gw = acc->head_w[k].row(n);
    for (std::size_t c = 0; c < C; ++c) {
      gw[c] += z[n] * dlogit[c];
      dz[n] += w[c] * dlogit[c];
    }
  }
  for (std::size_t c = 0; c < C; ++c) acc->head_b[k][c] += dlogit[c];

  const bool frontend_learnable =
      filtered || model.config.compression != Compression::kLog;
  if (!deep || !frontend_learnable) return result;

  Matrix d_comp(M, N);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) d_comp(m, n) = dz[n] / static_cast<double>(M);
  }
  const Matrix d_pre = compress_backward(pre, d_comp, model, *acc);
  if (!filtered) return result;
  const Matrix df = pool_backward(trace.f, d_pre, ctx, model.config.pool_stride, *acc);
  filter_backward(ctx, ex.wave, trace, df, *acc);
  return result;
}

}  // namespace

LossAndGrad loss_and_grad(const Model& model, std::span<const Example> batch,
                          GradScope scope) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "batch is empty");
  Context ctx(model);
  GradAccum acc(model);
  const double weight = 1.0 / static_cast<double>(batch.size());
  LossAndGrad out;
  for (const auto& ex : batch) {
    const auto r = example_pass(ctx, ex, weight, &acc, scope);
    out.loss += weight * r.loss;
    out.example_losses.push_back(r.loss);
    out.predictions.push_back(r.prediction);
  }
  if (!std::isfinite(out.loss)) fail(ErrorCode::kNonFiniteLoss, "loss is not finite");
  out.grads = acc.to_params(model);
  if (!out.grads.all_finite()) fail(ErrorCode::kNonFiniteLoss, "gradient is not finite");
  return out;
}

double batch_loss(const Model& model, std::span<const Example> batch) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "batch is empty");
  Context ctx(model);
  const double weight = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& ex : batch) loss += weight * example_pass(ctx, ex, weight, nullptr).loss;
  if (!std::isfinite(loss)) fail(ErrorCode::kNonFiniteLoss, "loss is not finite");
  return loss;
}

struct Predictor::Impl {
  explicit Impl(const Model& m) : ctx(m) {}
  Context ctx;
};

Predictor::Predictor(const Model& model) : impl_(std::make_unique<Impl>(model)) {}
Predictor::~Predictor() = default;

std::vector<double> Predictor::logits(const Waveform& x, int task) {
  const Model& model = impl_->ctx.model();
  if (task < 0 || static_cast<std::size_t>(task) >= model.heads.size()) {
    fail(ErrorCode::kUnknownTask, "task id " + std::to_string(task) + " has no head");
  }
  const Matrix comp = compress(precompression(impl_->ctx, x, nullptr), model);
  return head_logits(model.heads[static_cast<std::size_t>(task)], time_average(comp));
}

std::vector<double> predict_logits(const Model& model, const Waveform& x, int task) {
  return Predictor(model).logits(x, task);
}

Gradients finite_diff(const LossFn& loss_fn, const ParamSet& params, double h_rel) {
  if (!(h_rel > 0.0)) fail(ErrorCode::kInvalidArgument, "h_rel must be positive");
  Gradients out = params.zeros_like();
  ParamSet probe = params;
  for (const auto& [name, values] : params) {
    auto& slot = probe.at(name);
    auto& dst = out.at(name);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double theta = values[i];
      const double h = h_rel * std::max(1.0, std::abs(theta));
      const double up = theta + h, down = theta - h;
      slot[i] = up;
      const long double l_up = loss_fn(probe);
      slot[i] = down;
      const long double l_down = loss_fn(probe);
      slot[i] = theta;
      if (!std::isfinite(static_cast<double>(l_up)) || !std::isfinite(static_cast<double>(l_down))) {
        fail(ErrorCode::kNonFiniteLoss, "loss is not finite at " + name);
      }
      dst[i] = static_cast<double>((l_up - l_down) / (static_cast<long double>(up) - down));
    }
  }
  return out;
}

double relative_error(double a, double b) noexcept {
  return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

std::vector<std::string> default_gradcheck_variants() {
  return {"gabor/log", "gabor/pcen", "gabor/spcen", "normalized_conv/spcen", "mel/spcen",
          "mel/log"};
}

namespace {

std::vector<Example> gradcheck_batch(std::uint64_t seed, const GradCheckOptions& opt) {
  std::vector<Example> batch;
  Rng rng(seed);
  const double duration = static_cast<double>(opt.clip_samples) / kFrontendSampleRate;
  for (std::size_t i = 0; i < opt.batch_size; ++i) {
    ToneSpec spec;
    spec.duration_s = duration;
    spec.phase_seed = rng.next_u64();
    for (int k = 0; k < 3; ++k) {
      spec.frequencies.push_back(200.0 + 6000.0 * rng.uniform());
      spec.amplitudes.push_back(0.2 + 0.5 * rng.uniform());
    }
    Waveform clean = synth_tones(spec, kFrontendSampleRate);
    batch.push_back(Example{add_noise_snr(clean, 10.0, rng.next_u64()),
                            static_cast<int>(i % opt.num_classes), 0});
  }
  return batch;
}

}  // namespace

std::vector<GradCheckRow> grad_check_report(const FrontendConfig& base, std::uint64_t seed,
                                            const GradCheckOptions& opt) {
  const auto variants = opt.variants.empty() ? default_gradcheck_variants() : opt.variants;
  const auto batch = gradcheck_batch(mix_seed(seed, 1), opt);
  std::vector<GradCheckRow> rows;
  for (const auto& variant : variants) {
    const auto slash = variant.find('/');
    if (slash == std::string::npos) fail(ErrorCode::kInvalidArgument, "variant must be filtering/compression");
    FrontendConfig cfg = base;
    cfg.filtering = parse_filtering(variant.substr(0, slash));
    cfg.compression = parse_compression(variant.substr(slash + 1));

    Model model = Model::init(cfg, {opt.num_classes});
    // Move off the symmetric initial point so every parameter carries signal.
    Rng rng(mix_seed(seed, 2));
    ParamSet params = model.parameters();
    for (auto& [name, values] : params) {
      for (double& v : values) {
        if (name.rfind("head_", 0) == 0) {
          v = rng.normal();
        } else if (name == keys::kEta || name == keys::kSigma || name == keys::kPoolWidths) {
          v *= 1.0 + 0.05 * (rng.uniform() - 0.5);
        } else if (name == keys::kPcenSmooth || name == keys::kPcenAlpha) {
          v = std::clamp(v + 0.02 * (rng.uniform() - 0.5), 0.01, 0.99);
        } else if (name == keys::kPcenDelta || name == keys::kPcenRoot) {
          v += 0.2 * (rng.uniform() - 0.5);
        } else if (name == keys::kConvKernels) {
          v += 0.01 * (rng.uniform() - 0.5);
        }
      }
    }
    model.set_parameters(params);

    const auto analytic = loss_and_grad(model, batch).grads;
    const LossFn fn = [&](const ParamSet& p) {
      Model probe = model;
      probe.set_parameters(p);
      return batch_loss(probe, batch);
    };
    const auto numeric = finite_diff(fn, params, opt.h_rel);
    for (const auto& [name, a] : analytic) {
      GradCheckRow row{variant, name, 0.0, a.size(), 0};
      const auto& b = numeric.at(name);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = relative_error(a[i], b[i]);
        row.max_rel_err = std::max(row.max_rel_err, e);
        row.n_below_1e4 += e < 1e-4;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string gradcheck_csv(const std::vector<GradCheckRow>& rows) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "variant,param_group,max_rel_err,n_params\n";
  out.precision(6);
  for (const auto& r : rows) {
    out << r.variant << ',' << r.param_group << ',' << std::scientific << r.max_rel_err << ','
        << r.n_params << '\n';
  }
  return out.str();
}

}  // namespace leaf
