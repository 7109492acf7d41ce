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

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "leaf/model.hpp"
#include "leaf/signal.hpp"

namespace leaf {

struct Example {
  Waveform wave;
  int label = 0;
  int task = 0;
};

struct LossAndGrad {
  double loss = 0.0;
  Gradients grads;
  std::vector<double> example_losses;
  std::vector<int> predictions;  // argmax of each example's logits
};

// kHeads skips the frontend backward pass; frontend gradients are left zero.
enum class GradScope { kAll, kHeads };

// Mean over the batch of the cross-entropy of each example under its own
// task's head, applied to the time-averaged features. Gradients are exact
// reverse-mode derivatives through compression (including the PCEN moving
// average over all frames), pooling, squared-modulus filtering and the
// Gabor or kernel parametrization.
LossAndGrad loss_and_grad(const Model& model, std::span<const Example> batch,
                          GradScope scope = GradScope::kAll);
double batch_loss(const Model& model, std::span<const Example> batch);

// Logits of head `task` for one clip (single window, no averaging).
std::vector<double> predict_logits(const Model& model, const Waveform& x, int task);

// Same as predict_logits, but reuses filter spectra across many clips. The
// model must outlive the predictor and stay unchanged.
class Predictor {
 public:
  explicit Predictor(const Model& model);
  ~Predictor();
  Predictor(const Predictor&) = delete;
  Predictor& operator=(const Predictor&) = delete;

  std::vector<double> logits(const Waveform& x, int task);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using LossFn = std::function<double(const ParamSet&)>;

// Central differences with h = h_rel * max(1, |theta_i|).
Gradients finite_diff(const LossFn& loss_fn, const ParamSet& params, double h_rel);

double relative_error(double a, double b) noexcept;

struct GradCheckRow {
  std::string variant;
  std::string param_group;
  double max_rel_err = 0.0;
  std::size_t n_params = 0;
  std::size_t n_below_1e4 = 0;
};

struct GradCheckOptions {
  std::size_t clip_samples = 1600;
  std::size_t batch_size = 2;
  std::size_t num_classes = 3;
  double h_rel = 3e-6;
  // Variants as "filtering/compression"; empty means the standard set.
  std::vector<std::string> variants;
};

std::vector<std::string> default_gradcheck_variants();

std::vector<GradCheckRow> grad_check_report(const FrontendConfig& cfg, std::uint64_t seed,
                                            const GradCheckOptions& options = {});
std::string gradcheck_csv(const std::vector<GradCheckRow>& rows);

}  // namespace leaf
