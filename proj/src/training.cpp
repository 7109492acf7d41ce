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

#include "leaf/training.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <numbers>
#include <sstream>

#include "leaf/error.hpp"
#include "leaf/rng.hpp"

namespace leaf {

AdamState AdamState::init(const ParamSet& params, double lr) {
  AdamState s;
  s.first_moment = params.zeros_like();
  s.second_moment = params.zeros_like();
  s.lr = lr;
  return s;
}

void adam_step(AdamState& state, ParamSet& params, const Gradients& grads,
               const FrontendConfig& cfg) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    fail(ErrorCode::kShapeMismatch, "ADAM state, parameters and gradients differ in shape");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, p] : params) {
    const double lr = is_frontend_key(name) ? state.lr * state.frontend_lr_scale : state.lr;
    const auto& g = grads.at(name);
    auto& m = state.first_moment.at(name);
    auto& v = state.second_moment.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.eps_adam);
    }
  }
  project_parameters(params, cfg);
}

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::kPitch: return "pitch";
    case TaskKind::kAmRate: return "am";
    case TaskKind::kNoiseColor: return "noisecolor";
  }
  return "?";
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "pitch") return TaskKind::kPitch;
  if (s == "am") return TaskKind::kAmRate;
  if (s == "noisecolor") return TaskKind::kNoiseColor;
  fail(ErrorCode::kInvalidArgument, "unknown task '" + std::string(s) + "'");
}

TaskSpec TaskSpec::make(TaskKind kind, int task_id, double snr_db) {
  TaskSpec t;
  t.task_id = task_id;
  t.kind = kind;
  t.snr_db = snr_db;
  switch (kind) {
    case TaskKind::kPitch: t.num_classes = std::size(kPitchClassesHz); break;
    case TaskKind::kAmRate: t.num_classes = std::size(kAmRatesHz); break;
    case TaskKind::kNoiseColor: t.num_classes = 3; break;
  }
  return t;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> colored_noise(int label, std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  double prev = 0.0, state = 0.0;
  for (double& v : x) {
    const double w = rng.normal();
    switch (label) {
      case 0: v = w; break;
      case 1: state = 0.95 * state + w; v = state; break;
      default: v = w - prev; break;
    }
    prev = w;
  }
  const double rms = std::sqrt(mean_power(x));
  for (double& v : x) v /= rms;
  return x;
}

}  // namespace

Waveform generate_example(const TaskSpec& task, int label, double duration_s,
                          std::uint64_t seed) {
  if (label < 0 || static_cast<std::size_t>(label) >= task.num_classes) {
    fail(ErrorCode::kInvalidArgument, "label " + std::to_string(label) + " out of range");
  }
  if (!(duration_s > 0.0)) fail(ErrorCode::kInvalidArgument, "duration must be positive");
  const auto n = static_cast<std::size_t>(std::lround(duration_s * kFrontendSampleRate));
  if (n == 0) fail(ErrorCode::kInvalidArgument, "duration shorter than one sample");
  Rng rng(seed);
  const double gain = 0.2 + 0.6 * rng.uniform();
  std::vector<double> x(n);
  switch (task.kind) {
    case TaskKind::kPitch: {
      const double f = kPitchClassesHz[label] / kFrontendSampleRate;
      const double phase = kTwoPi * rng.uniform();
      for (std::size_t t = 0; t < n; ++t) x[t] = gain * std::sin(kTwoPi * f * t + phase);
      break;
    }
    case TaskKind::kAmRate: {
      const double fc = kAmCarrierHz / kFrontendSampleRate;
      const double fm = kAmRatesHz[label] / kFrontendSampleRate;
      const double pc = kTwoPi * rng.uniform(), pm = kTwoPi * rng.uniform();
      for (std::size_t t = 0; t < n; ++t) {
        const double env = 0.5 * (1.0 + std::sin(kTwoPi * fm * t + pm));
        x[t] = gain * env * std::sin(kTwoPi * fc * t + pc);
      }
      break;
    }
    case TaskKind::kNoiseColor: {
      x = colored_noise(label, n, rng);
      for (double& v : x) v *= gain;
      break;
    }
  }
  return add_noise_snr(Waveform(std::move(x), kFrontendSampleRate), task.snr_db,
                       rng.next_u64());
}

double multitask_loss(std::span<const Example> batch, const Model& model) {
  return batch_loss(model, batch);
}

namespace {

void check_tasks(const std::vector<TaskSpec>& tasks) {
  if (tasks.empty()) fail(ErrorCode::kInvalidArgument, "no tasks given");
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (tasks[k].task_id != static_cast<int>(k)) {
      fail(ErrorCode::kInvalidArgument, "task ids must be 0..K-1 in order");
    }
    if (tasks[k].num_classes < 2) fail(ErrorCode::kInvalidArgument, "tasks need >= 2 classes");
  }
}

std::ostringstream csv_stream() {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(10);
  return out;
}

}  // namespace

TrainResult train(const std::vector<TaskSpec>& tasks, const FrontendConfig& cfg,
                  const TrainOptions& options, const MelInitConfig& mel) {
  check_tasks(tasks);
  if (options.steps < 1) fail(ErrorCode::kInvalidArgument, "steps must be >= 1");
  if (options.batch_size < 1) fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (options.log_every < 1) fail(ErrorCode::kInvalidArgument, "log interval must be >= 1");
  if (!(options.frontend_lr_scale >= 0.0) || !std::isfinite(options.frontend_lr_scale)) {
    fail(ErrorCode::kInvalidArgument, "frontend lr scale must be finite and >= 0");
  }

  std::vector<std::size_t> classes;
  for (const auto& t : tasks) classes.push_back(t.num_classes);
  TrainResult out{Model::init(cfg, classes, mel), {}, {}};
  Model& model = out.model;
  ParamSet params = model.parameters();
  AdamState adam = AdamState::init(params, options.lr);
  adam.frontend_lr_scale = options.frontend_lr_scale;
  out.snapshots.push_back({0, params});

  const auto scope = options.freeze_frontend ? GradScope::kHeads : GradScope::kAll;
  Rng rng(mix_seed(options.seed, 0x7a1));
  std::vector<Example> batch;
  for (std::size_t step = 1; step <= options.steps; ++step) {
    batch.clear();
    for (std::size_t i = 0; i < options.batch_size; ++i) {
      const auto k = static_cast<std::size_t>(rng.below(tasks.size()));
      const auto label = static_cast<int>(rng.below(tasks[k].num_classes));
      const auto seed = rng.next_u64();
      batch.push_back({generate_example(tasks[k], label, options.clip_s, seed), label,
                       static_cast<int>(k)});
    }
    const LossAndGrad result = loss_and_grad(model, batch, scope);
    adam_step(adam, params, result.grads, cfg);
    model.set_parameters(params);
    if (options.on_step) options.on_step(StepInfo{step, model, result, batch});

    if (step % options.log_every == 0 || step == options.steps) {
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        double loss = 0.0;
        std::size_t n = 0, correct = 0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
          if (batch[i].task != static_cast<int>(k)) continue;
          loss += result.example_losses[i];
          correct += result.predictions[i] == batch[i].label;
          ++n;
        }
        if (n == 0) continue;
        out.metrics.push_back({step, static_cast<int>(k), loss / static_cast<double>(n),
                               static_cast<double>(correct) / static_cast<double>(n)});
      }
    }
    if ((step == options.steps / 2 && step != options.steps) || step == options.steps) {
      out.snapshots.push_back({step, params});
    }
  }
  return out;
}

std::string metrics_csv(std::span<const MetricRow> rows) {
  auto out = csv_stream();
  out << "step,task_id,loss,accuracy\n";
  for (const auto& r : rows) {
    out << r.step << ',' << r.task_id << ',' << r.loss << ',' << r.accuracy << '\n';
  }
  return out.str();
}

namespace {

std::vector<double> average_windows(Predictor& predictor, const Waveform& x, int task) {
  const std::size_t win = kFrontendSampleRate;
  if (x.size() < win) return predictor.logits(x, task);
  const std::size_t count = x.size() / win;
  const auto s = x.samples();
  std::vector<double> sum;
  for (std::size_t w = 0; w < count; ++w) {
    const auto first = s.begin() + static_cast<std::ptrdiff_t>(w * win);
    const auto l = predictor.logits(
        Waveform(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(win)),
                 x.sample_rate()),
        task);
    if (sum.empty()) sum.assign(l.size(), 0.0);
    for (std::size_t c = 0; c < l.size(); ++c) sum[c] += l[c];
  }
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

}  // namespace

std::vector<double> clip_logits(const Model& model, const Waveform& x, int task) {
  Predictor predictor(model);
  return average_windows(predictor, x, task);
}

double ci_half_width(double p, std::size_t n) noexcept {
  if (n == 0) return 0.0;
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

EvalResult evaluate(const Model& model, const TaskSpec& task, std::size_t n_examples,
                    std::uint64_t seed, double clip_s) {
  if (n_examples < 1) fail(ErrorCode::kInvalidArgument, "n_examples must be >= 1");
  if (task.task_id < 0 || static_cast<std::size_t>(task.task_id) >= model.heads.size()) {
    fail(ErrorCode::kUnknownTask, "task id " + std::to_string(task.task_id) + " has no head");
  }
  Predictor predictor(model);
  Rng rng(mix_seed(seed, 0xe7a1));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n_examples; ++i) {
    const auto label = static_cast<int>(i % task.num_classes);
    const auto x = generate_example(task, label, clip_s, rng.next_u64());
    const auto logits = average_windows(predictor, x, task.task_id);
    correct += std::max_element(logits.begin(), logits.end()) - logits.begin() == label;
  }
  EvalResult r;
  r.n = n_examples;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(n_examples);
  r.ci_half_width = ci_half_width(r.accuracy, n_examples);
  return r;
}

BootstrapResult bootstrap_diff(std::span<const double> acc_a, std::span<const double> acc_b,
                               std::size_t iters, std::uint64_t seed) {
  if (acc_a.size() != acc_b.size()) {
    fail(ErrorCode::kLengthMismatch, "accuracy lists differ in length");
  }
  if (acc_a.size() < 2) fail(ErrorCode::kInvalidArgument, "need at least two paired values");
  if (iters < 1) fail(ErrorCode::kInvalidArgument, "iters must be >= 1");
  const std::size_t n = acc_a.size();
  std::vector<double> d(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = acc_a[i] - acc_b[i];
    total += d[i];
  }
  Rng rng(seed);
  std::size_t at_most_zero = 0;
  for (std::size_t it = 0; it < iters; ++it) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += d[rng.below(n)];
    at_most_zero += sum <= 0.0;
  }
  return {total / static_cast<double>(n),
          static_cast<double>(at_most_zero) / static_cast<double>(iters)};
}

std::vector<SweepRow> noise_sweep(const TaskSpec& task, std::span<const double> snr_list,
                                  std::span<const SweepVariant> variants, std::uint64_t seed,
                                  const SweepOptions& options) {
  if (options.seeds < 1) fail(ErrorCode::kInvalidArgument, "need at least one seed");
  TaskSpec base = task;
  base.task_id = 0;
  std::vector<SweepRow> rows;
  for (const auto& variant : variants) {
    for (double snr : snr_list) {
      TaskSpec noisy = base;
      noisy.snr_db = snr;
      SweepRow row{variant.name, snr, 0.0, 0.0, {}};
      for (std::size_t r = 0; r < options.seeds; ++r) {
        TrainOptions opt = options.train;
        opt.seed = mix_seed(seed, r);
        opt.on_step = nullptr;
        const auto trained = train({noisy}, variant.cfg, opt);
        const auto eval =
            evaluate(trained.model, noisy, options.eval_examples, mix_seed(seed, 1000 + r));
        row.seed_accuracies.push_back(eval.accuracy);
        row.accuracy += eval.accuracy / static_cast<double>(options.seeds);
      }
      row.ci_half_width = ci_half_width(row.accuracy, options.eval_examples * options.seeds);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  auto out = csv_stream();
  out << "variant,snr_db,accuracy,ci95";
  const std::size_t seeds = rows.empty() ? 0 : rows.front().seed_accuracies.size();
  for (std::size_t r = 0; r < seeds; ++r) out << ",seed" << r;
  out << '\n';
  for (const auto& row : rows) {
    out << row.variant << ',' << row.snr_db << ',' << row.accuracy << ',' << row.ci_half_width;
    for (double a : row.seed_accuracies) out << ',' << a;
    out << '\n';
  }
  return out.str();
}

}  // namespace leaf
