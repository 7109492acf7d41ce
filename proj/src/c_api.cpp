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

#include "leaf/leaf.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <locale>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "leaf/autodiff.hpp"
#include "leaf/error.hpp"
#include "leaf/feature_io.hpp"
#include "leaf/frontend.hpp"
#include "leaf/model.hpp"
#include "leaf/training.hpp"

struct leaf_config {
  leaf::FrontendConfig cfg;
  leaf::MelInitConfig mel;
};

struct leaf_waveform {
  leaf::Waveform wave;
};

struct leaf_features {
  leaf::FeatureMap map;
};

struct leaf_model {
  leaf::Model model;
};

namespace {

thread_local std::string g_last_error;

using leaf::ErrorCode;
using leaf::fail;

template <class F>
leaf_status guard(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return LEAF_OK;
  } catch (const leaf::Error& e) {
    g_last_error = e.what();
    return static_cast<leaf_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return LEAF_INTERNAL;
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_list(const char* list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "empty list");
  return out;
}

leaf::TrainOptions to_train_options(const leaf_train_options& o) {
  leaf::TrainOptions t;
  t.steps = o.steps;
  t.batch_size = o.batch_size;
  t.lr = o.lr;
  t.seed = o.seed;
  t.clip_s = o.clip_s;
  t.log_every = o.log_every;
  t.freeze_frontend = o.freeze_frontend != 0;
  t.frontend_lr_scale = o.frontend_lr_scale;
  return t;
}

std::ostringstream csv_stream() {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(10);
  return out;
}

}  // namespace

extern "C" {

const char* leaf_status_name(leaf_status status) {
  return leaf::error_name(static_cast<ErrorCode>(status)).data();
}

const char* leaf_last_error(void) { return g_last_error.c_str(); }

void leaf_string_free(char* s) { std::free(s); }

leaf_status leaf_config_new(leaf_config** out) {
  return guard([&] {
    require(out, "out");
    *out = new leaf_config{};
  });
}

void leaf_config_free(leaf_config* cfg) { delete cfg; }

leaf_status leaf_config_set_frontend(leaf_config* cfg, const char* kind) {
  return guard([&] {
    require(cfg, "cfg");
    require(kind, "kind");
    leaf::apply_frontend_kind(kind, cfg->cfg);
  });
}

leaf_status leaf_config_set(leaf_config* cfg, const char* key, const char* value) {
  return guard([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    leaf::apply_config({{key, value}}, cfg->cfg, cfg->mel);
  });
}

leaf_status leaf_config_load_file(leaf_config* cfg, const char* path) {
  return guard([&] {
    require(cfg, "cfg");
    require(path, "path");
    const auto bytes = leaf::read_file(path);
    const std::string text(bytes.begin(), bytes.end());
    leaf::apply_config(leaf::parse_key_values(text), cfg->cfg, cfg->mel);
  });
}

leaf_status leaf_config_to_string(const leaf_config* cfg, char** out) {
  return guard([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup_string(leaf::format_config(cfg->cfg, cfg->mel));
  });
}

leaf_status leaf_config_param_count(const leaf_config* cfg, size_t* out) {
  return guard([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = leaf::param_count(cfg->cfg);
  });
}

leaf_status leaf_waveform_load(const char* path, leaf_waveform** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new leaf_waveform{leaf::load_wav(path)};
  });
}

leaf_status leaf_waveform_from_samples(const double* samples, size_t n, int sample_rate,
                                       leaf_waveform** out) {
  return guard([&] {
    require(samples, "samples");
    require(out, "out");
    *out = new leaf_waveform{leaf::Waveform(std::vector<double>(samples, samples + n), sample_rate)};
  });
}

void leaf_waveform_free(leaf_waveform* w) { delete w; }

size_t leaf_waveform_size(const leaf_waveform* w) { return w == nullptr ? 0 : w->wave.size(); }

leaf_status leaf_extract(const leaf_config* cfg, const leaf_model* model, const leaf_waveform* w,
                         leaf_features** out) {
  return guard([&] {
    require(w, "waveform");
    require(out, "out");
    if (model != nullptr) {
      *out = new leaf_features{
          leaf::frontend_forward(w->wave, model->model.state, model->model.config)};
      return;
    }
    require(cfg, "cfg");
    const auto state = leaf::FrontendState::init(cfg->cfg, cfg->mel);
    *out = new leaf_features{leaf::frontend_forward(w->wave, state, cfg->cfg)};
  });
}

void leaf_features_free(leaf_features* f) { delete f; }

size_t leaf_features_frames(const leaf_features* f) { return f == nullptr ? 0 : f->map.frames(); }

size_t leaf_features_channels(const leaf_features* f) {
  return f == nullptr ? 0 : f->map.channels();
}

double leaf_features_frame_rate(const leaf_features* f) {
  return f == nullptr ? 0.0 : f->map.frame_rate;
}

const double* leaf_features_data(const leaf_features* f) {
  return f == nullptr ? nullptr : f->map.values.values().data();
}

leaf_status leaf_features_write(const leaf_features* f, const char* path) {
  return guard([&] {
    require(f, "features");
    require(path, "path");
    leaf::write_features(path, f->map);
  });
}

leaf_status leaf_features_read(const char* path, leaf_features** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new leaf_features{leaf::read_features(path)};
  });
}

leaf_status leaf_mel_equivalence(const leaf_config* cfg, const leaf_waveform* w, double* out,
                                 size_t capacity, size_t* n_out) {
  return guard([&] {
    require(cfg, "cfg");
    require(w, "waveform");
    if (out == nullptr && capacity > 0) fail(ErrorCode::kInvalidArgument, "out is null");
    const auto corr = leaf::mel_equivalence(w->wave, cfg->cfg, cfg->mel);
    for (size_t i = 0; i < corr.size() && i < capacity; ++i) out[i] = corr[i];
    if (n_out != nullptr) *n_out = corr.size();
  });
}

leaf_status leaf_model_load(const char* dir, leaf_model** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new leaf_model{leaf::load_model(dir)};
  });
}

leaf_status leaf_model_save(const leaf_model* model, const char* dir) {
  return guard([&] {
    require(model, "model");
    require(dir, "dir");
    leaf::save_model(dir, model->model);
  });
}

void leaf_model_free(leaf_model* model) { delete model; }

leaf_status leaf_model_config(const leaf_model* model, leaf_config** out) {
  return guard([&] {
    require(model, "model");
    require(out, "out");
    *out = new leaf_config{model->model.config, model->model.state.mel};
  });
}

leaf_status leaf_model_inspect_csv(const leaf_model* model, char** out) {
  return guard([&] {
    require(model, "model");
    require(out, "out");
    const auto& s = model->model.state;
    const double rate = model->model.config.sample_rate;
    auto csv = csv_stream();
    csv << "channel,center_hz,sigma,pool_width,alpha,delta,root,smooth\n";
    for (size_t n = 0; n < model->model.channels(); ++n) {
      csv << n << ',' << s.bank.center_freqs[n] * rate << ',' << s.bank.inv_bandwidths[n] << ','
          << s.pooling.widths[n] << ',' << s.pcen.alpha[n] << ',' << s.pcen.delta[n] << ','
          << s.pcen.root[n] << ',' << s.pcen.smooth[n] << '\n';
    }
    *out = dup_string(csv.str());
  });
}

leaf_status leaf_bank_csv(const leaf_config* cfg, char** out) {
  return guard([&] {
    require(cfg, "cfg");
    require(out, "out");
    const auto state = leaf::FrontendState::init(cfg->cfg, cfg->mel);
    const double rate = cfg->cfg.sample_rate;
    auto csv = csv_stream();
    csv << "channel,center_hz,sigma,fwhm\n";
    for (size_t n = 0; n < state.bank.size(); ++n) {
      const double sigma = state.bank.inv_bandwidths[n];
      csv << n << ',' << state.bank.center_freqs[n] * rate << ',' << sigma << ','
          << leaf::kFwhmFactor / sigma << '\n';
    }
    *out = dup_string(csv.str());
  });
}

leaf_train_options leaf_train_options_default(void) {
  const leaf::TrainOptions t;
  leaf_train_options o{};
  o.steps = t.steps;
  o.batch_size = t.batch_size;
  o.lr = t.lr;
  o.seed = t.seed;
  o.clip_s = t.clip_s;
  o.snr_db = std::numeric_limits<double>::infinity();
  o.log_every = t.log_every;
  o.freeze_frontend = 0;
  o.frontend_lr_scale = t.frontend_lr_scale;
  return o;
}

leaf_status leaf_train(const leaf_config* cfg, const char* tasks,
                       const leaf_train_options* options, const char* out_dir,
                       leaf_model** model_out, char** metrics_csv_out) {
  return guard([&] {
    require(cfg, "cfg");
    require(tasks, "tasks");
    require(options, "options");
    std::vector<leaf::TaskSpec> specs;
    for (const auto& name : split_list(tasks)) {
      specs.push_back(leaf::TaskSpec::make(leaf::parse_task_kind(name),
                                           static_cast<int>(specs.size()), options->snr_db));
    }
    const auto result = leaf::train(specs, cfg->cfg, to_train_options(*options), cfg->mel);
    const std::string csv = leaf::metrics_csv(result.metrics);
    if (out_dir != nullptr) {
      const std::filesystem::path dir(out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) fail(ErrorCode::kIoError, "cannot create " + dir.string());
      leaf::write_text(dir / "metrics.csv", csv);
      for (const auto& snap : result.snapshots) {
        leaf::Model m = result.model;
        m.set_parameters(snap.params);
        leaf::save_model(dir / ("snapshot_" + std::to_string(snap.step)), m);
      }
    }
    if (metrics_csv_out != nullptr) *metrics_csv_out = dup_string(csv);
    if (model_out != nullptr) *model_out = new leaf_model{result.model};
  });
}

leaf_status leaf_evaluate(const leaf_model* model, const char* task, int task_id, double snr_db,
                          size_t n_examples, uint64_t seed, double* accuracy,
                          double* ci_half_width) {
  return guard([&] {
    require(model, "model");
    require(task, "task");
    auto spec = leaf::TaskSpec::make(leaf::parse_task_kind(task), task_id, snr_db);
    if (task_id < 0 || static_cast<size_t>(task_id) >= model->model.heads.size()) {
      fail(ErrorCode::kUnknownTask, "model has no head " + std::to_string(task_id));
    }
    if (model->model.heads[static_cast<size_t>(task_id)].num_classes() != spec.num_classes) {
      fail(ErrorCode::kShapeMismatch, "head class count does not match the task");
    }
    const auto r = leaf::evaluate(model->model, spec, n_examples, seed);
    if (accuracy != nullptr) *accuracy = r.accuracy;
    if (ci_half_width != nullptr) *ci_half_width = r.ci_half_width;
  });
}

leaf_status leaf_gradcheck(const leaf_config* cfg, uint64_t seed, char** csv_out) {
  return guard([&] {
    require(cfg, "cfg");
    require(csv_out, "csv_out");
    *csv_out = dup_string(leaf::gradcheck_csv(leaf::grad_check_report(cfg->cfg, seed)));
  });
}

leaf_status leaf_bootstrap(const double* acc_a, const double* acc_b, size_t n, size_t iters,
                           uint64_t seed, double* mean_diff, double* p_value) {
  return guard([&] {
    require(acc_a, "acc_a");
    require(acc_b, "acc_b");
    const auto r = leaf::bootstrap_diff({acc_a, n}, {acc_b, n}, iters, seed);
    if (mean_diff != nullptr) *mean_diff = r.mean_diff;
    if (p_value != nullptr) *p_value = r.p_value;
  });
}

leaf_status leaf_noise_sweep(const leaf_config* cfg, const char* task, const double* snr_db,
                             size_t n_snr, const char* variants,
                             const leaf_train_options* options, size_t eval_examples,
                             size_t seeds, uint64_t seed, char** csv_out) {
  return guard([&] {
    require(cfg, "cfg");
    require(task, "task");
    require(snr_db, "snr_db");
    require(variants, "variants");
    require(options, "options");
    require(csv_out, "csv_out");
    std::vector<leaf::SweepVariant> list;
    for (const auto& name : split_list(variants)) {
      leaf::SweepVariant v{name, cfg->cfg};
      leaf::apply_frontend_kind(name, v.cfg);
      list.push_back(v);
    }
    leaf::SweepOptions opt;
    opt.train = to_train_options(*options);
    opt.eval_examples = eval_examples;
    opt.seeds = seeds;
    const auto spec = leaf::TaskSpec::make(leaf::parse_task_kind(task));
    const auto rows = leaf::noise_sweep(spec, {snr_db, n_snr}, list, seed, opt);
    *csv_out = dup_string(leaf::sweep_csv(rows));
  });
}

}  // extern "C"
