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
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leaf/autodiff.hpp"
#include "leaf/model.hpp"

namespace leaf {

struct AdamState {
  ParamSet first_moment;
  ParamSet second_moment;
  std::uint64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  // Multiplies lr for frontend keys; head keys always use lr.
  double frontend_lr_scale = 1.0;

  static AdamState init(const ParamSet& params, double lr = 1e-3);
};

// Bias-corrected ADAM update of params in place, then projection of every
// frontend key into its valid range for cfg.
void adam_step(AdamState& state, ParamSet& params, const Gradients& grads,
               const FrontendConfig& cfg = {});

enum class TaskKind { kPitch, kAmRate, kNoiseColor };

std::string_view to_string(TaskKind kind) noexcept;
TaskKind parse_task_kind(std::string_view s);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct TaskSpec {
  int task_id = 0;
  TaskKind kind = TaskKind::kPitch;
  std::size_t num_classes = 4;
  double snr_db = kNoNoise;

  static TaskSpec make(TaskKind kind, int task_id = 0, double snr_db = kNoNoise);
};

// Pitch classes are tones at these frequencies; AM classes modulate a
// 1 kHz carrier at these rates.
inline constexpr double kPitchClassesHz[] = {400.0, 800.0, 1600.0, 3200.0};
inline constexpr double kAmRatesHz[] = {4.0, 16.0, 64.0};
inline constexpr double kAmCarrierHz = 1000.0;

// Deterministic in (task, label, duration, seed). Noise at task.snr_db is
// mixed in after the clean signal is drawn.
Waveform generate_example(const TaskSpec& task, int label, double duration_s,
                          std::uint64_t seed);

// Mean over the batch of each example's cross-entropy under its own head.
double multitask_loss(std::span<const Example> batch, const Model& model);

struct MetricRow {
  std::size_t step = 0;
  int task_id = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct Snapshot {
  std::size_t step = 0;
  ParamSet params;
};

struct StepInfo {
  std::size_t step = 0;  // 1-based, after the update
  const Model& model;
  const LossAndGrad& result;
  std::span<const Example> batch;
};

struct TrainOptions {
  std::size_t steps = 2000;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double clip_s = 0.25;
  std::size_t log_every = 50;
  bool freeze_frontend = false;
  double frontend_lr_scale = 1.0;
  std::function<void(const StepInfo&)> on_step;
};

struct TrainResult {
  Model model;
  std::vector<MetricRow> metrics;
  std::vector<Snapshot> snapshots;  // steps 0, steps/2 and steps
};

// Each batch example draws its task uniformly, then a label uniformly.
TrainResult train(const std::vector<TaskSpec>& tasks, const FrontendConfig& cfg,
                  const TrainOptions& options, const MelInitConfig& mel = {});

std::string metrics_csv(std::span<const MetricRow> rows);

struct EvalResult {
  double accuracy = 0.0;
  double ci_half_width = 0.0;
  std::size_t n = 0;
};

// Logits averaged over consecutive non-overlapping 1 s windows. A trailing
// partial window is dropped; a clip shorter than one window is used whole.
std::vector<double> clip_logits(const Model& model, const Waveform& x, int task);

EvalResult evaluate(const Model& model, const TaskSpec& task, std::size_t n_examples,
                    std::uint64_t seed, double clip_s = 1.0);

double ci_half_width(double p, std::size_t n) noexcept;

struct BootstrapResult {
  double mean_diff = 0.0;
  double p_value = 0.0;
};

// Paired differences a_i - b_i resampled with replacement; p is the fraction
// of resample means <= 0.
BootstrapResult bootstrap_diff(std::span<const double> acc_a, std::span<const double> acc_b,
                               std::size_t iters, std::uint64_t seed);

struct SweepVariant {
  std::string name;
  FrontendConfig cfg;
};

struct SweepOptions {
  TrainOptions train;
  std::size_t eval_examples = 200;
  std::size_t seeds = 3;
};

struct SweepRow {
  std::string variant;
  double snr_db = 0.0;
  double accuracy = 0.0;  // mean over seeds
  double ci_half_width = 0.0;
  std::vector<double> seed_accuracies;
};

// Trains and evaluates every variant at every SNR, with noise in both phases.
std::vector<SweepRow> noise_sweep(const TaskSpec& task, std::span<const double> snr_list,
                                  std::span<const SweepVariant> variants, std::uint64_t seed,
                                  const SweepOptions& options);

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace leaf
