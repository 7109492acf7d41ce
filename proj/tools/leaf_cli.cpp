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

// Command-line front end. Links only the C API in leaf/leaf.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <locale>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "leaf/leaf.h"

namespace {

// Raised when the library reports a failure; carries the status for the exit line.
struct Failure {
  leaf_status status;
  std::string message;
};

void check(leaf_status s) {
  if (s != LEAF_OK) throw Failure{s, leaf_last_error()};
}

struct ConfigDeleter {
  void operator()(leaf_config* p) const { leaf_config_free(p); }
};
struct WaveDeleter {
  void operator()(leaf_waveform* p) const { leaf_waveform_free(p); }
};
struct FeatureDeleter {
  void operator()(leaf_features* p) const { leaf_features_free(p); }
};
struct ModelDeleter {
  void operator()(leaf_model* p) const { leaf_model_free(p); }
};
using ConfigPtr = std::unique_ptr<leaf_config, ConfigDeleter>;
using WavePtr = std::unique_ptr<leaf_waveform, WaveDeleter>;
using FeaturePtr = std::unique_ptr<leaf_features, FeatureDeleter>;
using ModelPtr = std::unique_ptr<leaf_model, ModelDeleter>;

std::string take_string(char* s) {
  std::string out(s);
  leaf_string_free(s);
  return out;
}

double parse_real(const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  in >> v;
  if (in.fail() || !in.eof()) throw CLI::ValidationError("not a number: " + text);
  return v;
}

std::vector<double> parse_reals(const std::string& list) {
  std::vector<double> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw CLI::ValidationError("empty list");
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{LEAF_IO_ERROR, "cannot write " + path};
}

std::string format_real(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(10);
  out << v;
  return out.str();
}

struct FrontendFlags {
  std::string config_path;
  std::string frontend;
  std::optional<int> filters;
  std::optional<int> filter_len;
  std::optional<int> stride;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "key=value config file");
    app->add_option("--frontend", frontend, "leaf|leaf-log|leaf-pcen|mel|mel-pcen|convnorm")
        ->check(CLI::IsMember({"leaf", "leaf-log", "leaf-pcen", "mel", "mel-pcen", "convnorm"}));
    app->add_option("--filters", filters, "number of channels");
    app->add_option("--filter-len", filter_len, "filter length in samples");
    app->add_option("--stride", stride, "pooling stride in samples");
  }

  ConfigPtr build() const {
    leaf_config* raw = nullptr;
    check(leaf_config_new(&raw));
    ConfigPtr cfg(raw);
    if (!config_path.empty()) check(leaf_config_load_file(cfg.get(), config_path.c_str()));
    if (!frontend.empty()) check(leaf_config_set_frontend(cfg.get(), frontend.c_str()));
    if (filters) check(leaf_config_set(cfg.get(), "n_filters", std::to_string(*filters).c_str()));
    if (filter_len) {
      check(leaf_config_set(cfg.get(), "filter_len", std::to_string(*filter_len).c_str()));
    }
    if (stride) check(leaf_config_set(cfg.get(), "pool_stride", std::to_string(*stride).c_str()));
    return cfg;
  }
};

struct TrainFlags {
  std::size_t steps = 2000;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::string snr_db = "inf";
  double clip_s = 0.25;
  std::size_t log_every = 50;
  bool freeze = false;
  double frontend_lr_scale = 1.0;

  void add(CLI::App* app) {
    app->add_option("--steps", steps, "optimizer steps")->check(CLI::PositiveNumber);
    app->add_option("--batch", batch, "batch size")->check(CLI::PositiveNumber);
    app->add_option("--lr", lr, "ADAM learning rate");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--clip-s", clip_s, "training clip length in seconds");
    app->add_option("--log-every", log_every, "metrics interval in steps");
    app->add_flag("--freeze-frontend", freeze, "train the heads only");
    app->add_option("--frontend-lr-scale", frontend_lr_scale,
                    "learning rate multiplier for frontend parameters");
  }

  leaf_train_options options() const {
    leaf_train_options o = leaf_train_options_default();
    o.steps = steps;
    o.batch_size = batch;
    o.lr = lr;
    o.seed = seed;
    o.clip_s = clip_s;
    o.snr_db = parse_real(snr_db);
    o.log_every = log_every;
    o.freeze_frontend = freeze ? 1 : 0;
    o.frontend_lr_scale = frontend_lr_scale;
    return o;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Learnable audio frontend toolkit"};
  app.require_subcommand(1, 1);

  FrontendFlags fe;
  TrainFlags tr;
  std::string input, out, model_dir, task = "pitch", variants, a_list, b_list;
  std::string snr_list = "inf,5,0,-5";
  bool compare = false, bank = false;
  std::uint64_t seed = 0;
  std::size_t iters = 100000, n_eval = 1000, seeds = 3;
  int task_id = 0;

  auto* extract = app.add_subcommand("extract", "compute a feature file from a WAV file");
  fe.add(extract);
  extract->add_option("--input", input, "16 kHz PCM16 mono WAV")->required();
  extract->add_option("--out", out, "feature file to write");
  extract->add_option("--model", model_dir, "trained model directory");
  extract->add_flag("--compare", compare, "print per-channel correlation with mel features");
  extract->add_option("--seed", seed, "unused; accepted for uniformity");

  auto* train = app.add_subcommand("train", "train a frontend and task heads");
  fe.add(train);
  tr.add(train);
  train->add_option("--task", task, "comma-separated tasks: pitch, am, noisecolor");
  train->add_option("--snr-db", tr.snr_db, "noise level in dB, or inf");
  train->add_option("--out", out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--model", model_dir, "model directory")->required();
  eval->add_option("--task", task, "pitch|am|noisecolor")
      ->check(CLI::IsMember({"pitch", "am", "noisecolor"}));
  eval->add_option("--task-id", task_id, "head index");
  eval->add_option("--snr-db", tr.snr_db, "noise level in dB, or inf");
  eval->add_option("--n", n_eval, "number of test clips")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "test-set seed");

  auto* gradcheck = app.add_subcommand("gradcheck", "compare gradients with finite differences");
  fe.add(gradcheck);
  gradcheck->add_option("--seed", seed, "random seed");
  gradcheck->add_option("--out", out, "CSV path (default stdout)");

  auto* inspect = app.add_subcommand("inspect", "dump frontend parameters as CSV");
  fe.add(inspect);
  inspect->add_option("--model", model_dir, "model directory");
  inspect->add_flag("--bank", bank, "dump the initial Gabor bank instead");
  inspect->add_option("--out", out, "CSV path (default stdout)");

  auto* bootstrap = app.add_subcommand("bootstrap", "paired bootstrap test of accuracy lists");
  bootstrap->add_option("--a", a_list, "comma-separated accuracies")->required();
  bootstrap->add_option("--b", b_list, "comma-separated accuracies")->required();
  bootstrap->add_option("--iters", iters, "bootstrap resamples")->check(CLI::PositiveNumber);
  bootstrap->add_option("--seed", seed, "random seed");

  auto* sweep = app.add_subcommand("noise-sweep", "accuracy across SNRs and frontends");
  fe.add(sweep);
  tr.add(sweep);
  sweep->add_option("--task", task, "pitch|am|noisecolor")
      ->check(CLI::IsMember({"pitch", "am", "noisecolor"}));
  sweep->add_option("--snr-db", snr_list, "comma-separated SNRs in dB (inf allowed)");
  sweep->add_option("--variants", variants, "comma-separated frontends")->required();
  sweep->add_option("--eval-n", n_eval, "test clips per run")->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", seeds, "runs per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
    if (inspect->parsed() && !bank && model_dir.empty()) {
      throw CLI::RequiredError("inspect needs --model or --bank");
    }
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  if (extract->parsed()) {
    const auto cfg = fe.build();
    leaf_waveform* w = nullptr;
    check(leaf_waveform_load(input.c_str(), &w));
    WavePtr wave(w);
    ModelPtr model;
    if (!model_dir.empty()) {
      leaf_model* m = nullptr;
      check(leaf_model_load(model_dir.c_str(), &m));
      model.reset(m);
    }
    std::size_t count = 0;
    if (model) {
      leaf_config* mc = nullptr;
      check(leaf_model_config(model.get(), &mc));
      ConfigPtr owned(mc);
      check(leaf_config_param_count(owned.get(), &count));
    } else {
      check(leaf_config_param_count(cfg.get(), &count));
    }
    leaf_features* f = nullptr;
    check(leaf_extract(cfg.get(), model.get(), wave.get(), &f));
    FeaturePtr features(f);
    std::cout << "param_count " << count << "\n";
    if (!out.empty()) check(leaf_features_write(features.get(), out.c_str()));
    if (compare) {
      std::size_t n = 0;
      check(leaf_mel_equivalence(cfg.get(), wave.get(), nullptr, 0, &n));
      std::vector<double> corr(n);
      check(leaf_mel_equivalence(cfg.get(), wave.get(), corr.data(), corr.size(), &n));
      std::cout << "channel,correlation\n";
      for (std::size_t i = 0; i < n; ++i) std::cout << i << ',' << format_real(corr[i]) << "\n";
    }
  } else if (train->parsed()) {
    const auto cfg = fe.build();
    const auto options = tr.options();
    char* csv = nullptr;
    check(leaf_train(cfg.get(), task.c_str(), &options, out.c_str(), nullptr, &csv));
    const std::string metrics = take_string(csv);
    // Echo the last logged rows as a summary.
    std::istringstream lines(metrics);
    std::string line, header, last_step;
    std::vector<std::string> tail;
    std::getline(lines, header);
    while (std::getline(lines, line)) {
      const std::string step = line.substr(0, line.find(','));
      if (step != last_step) tail.clear();
      last_step = step;
      tail.push_back(line);
    }
    std::cout << header << "\n";
    for (const auto& l : tail) std::cout << l << "\n";
  } else if (eval->parsed()) {
    leaf_model* m = nullptr;
    check(leaf_model_load(model_dir.c_str(), &m));
    ModelPtr model(m);
    double acc = 0.0, ci = 0.0;
    check(leaf_evaluate(model.get(), task.c_str(), task_id, parse_real(tr.snr_db), n_eval, seed,
                        &acc, &ci));
    std::cout << "accuracy,ci95\n" << format_real(acc) << ',' << format_real(ci) << "\n";
  } else if (gradcheck->parsed()) {
    const auto cfg = fe.build();
    char* csv = nullptr;
    check(leaf_gradcheck(cfg.get(), seed, &csv));
    emit(take_string(csv), out);
  } else if (inspect->parsed()) {
    char* csv = nullptr;
    if (bank) {
      const auto cfg = fe.build();
      check(leaf_bank_csv(cfg.get(), &csv));
    } else {
      leaf_model* m = nullptr;
      check(leaf_model_load(model_dir.c_str(), &m));
      ModelPtr model(m);
      check(leaf_model_inspect_csv(model.get(), &csv));
    }
    emit(take_string(csv), out);
  } else if (bootstrap->parsed()) {
    std::vector<double> a, b;
    try {
      a = parse_reals(a_list);
      b = parse_reals(b_list);
    } catch (const CLI::ParseError& e) {
      std::cerr << e.what() << "\n" << bootstrap->help();
      return 2;
    }
    if (a.size() != b.size()) throw Failure{LEAF_LENGTH_MISMATCH, "--a and --b differ in length"};
    double mean = 0.0, p = 0.0;
    check(leaf_bootstrap(a.data(), b.data(), a.size(), iters, seed, &mean, &p));
    std::cout << "mean_diff,p_value\n" << format_real(mean) << ',' << format_real(p) << "\n";
  } else if (sweep->parsed()) {
    std::vector<double> snrs;
    try {
      snrs = parse_reals(snr_list);
    } catch (const CLI::ParseError& e) {
      std::cerr << e.what() << "\n" << sweep->help();
      return 2;
    }
    const auto cfg = fe.build();
    const auto options = tr.options();
    char* csv = nullptr;
    check(leaf_noise_sweep(cfg.get(), task.c_str(), snrs.data(), snrs.size(), variants.c_str(),
                           &options, n_eval, seeds, tr.seed, &csv));
    emit(take_string(csv), out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& f) {
    std::cerr << "error: " << leaf_status_name(f.status) << ": " << f.message << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
}
