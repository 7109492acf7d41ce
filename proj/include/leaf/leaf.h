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

/* C interface to the leaf frontend library.
 *
 * All objects are opaque handles created by a new, load or init call and
 * released with the matching free call. Every fallible call returns a
 * leaf_status; on failure leaf_last_error() describes the most recent error
 * on the calling thread. Strings returned through char** out-parameters are
 * owned by the caller and released with leaf_string_free.
 */
#ifndef LEAF_LEAF_H_
#define LEAF_LEAF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LEAF_BUILDING_LIBRARY)
#define LEAF_API __attribute__((visibility("default")))
#else
#define LEAF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum leaf_status {
  LEAF_OK = 0,
  LEAF_NOT_WAV = 1,
  LEAF_UNSUPPORTED_FORMAT = 2,
  LEAF_BAD_RATE = 3,
  LEAF_ALIASED_FREQUENCY = 4,
  LEAF_SILENT_INPUT = 5,
  LEAF_DEGENERATE_TRIANGLE = 6,
  LEAF_NEGATIVE_INPUT = 7,
  LEAF_ZERO_FILTER = 8,
  LEAF_NON_FINITE_LOSS = 9,
  LEAF_SHAPE_MISMATCH = 10,
  LEAF_UNKNOWN_TASK = 11,
  LEAF_LENGTH_MISMATCH = 12,
  LEAF_NON_FINITE_INPUT = 13,
  LEAF_INVALID_ARGUMENT = 14,
  LEAF_INVALID_CONFIG = 15,
  LEAF_IO_ERROR = 16,
  LEAF_BAD_FORMAT = 17,
  LEAF_INTERNAL = 18
} leaf_status;

typedef struct leaf_config leaf_config;
typedef struct leaf_waveform leaf_waveform;
typedef struct leaf_features leaf_features;
typedef struct leaf_model leaf_model;

/* Error reporting. */
LEAF_API const char* leaf_status_name(leaf_status status);
LEAF_API const char* leaf_last_error(void);
LEAF_API void leaf_string_free(char* s);

/* Frontend configuration (frontend and mel-initialization fields). */
LEAF_API leaf_status leaf_config_new(leaf_config** out);
LEAF_API void leaf_config_free(leaf_config* cfg);
/* Named preset: leaf, leaf-log, leaf-pcen, mel, mel-pcen or convnorm. */
LEAF_API leaf_status leaf_config_set_frontend(leaf_config* cfg, const char* kind);
/* Same keys as the key=value config file, e.g. "n_filters", "filter_len". */
LEAF_API leaf_status leaf_config_set(leaf_config* cfg, const char* key, const char* value);
LEAF_API leaf_status leaf_config_load_file(leaf_config* cfg, const char* path);
LEAF_API leaf_status leaf_config_to_string(const leaf_config* cfg, char** out);
LEAF_API leaf_status leaf_config_param_count(const leaf_config* cfg, size_t* out);

/* Audio. */
LEAF_API leaf_status leaf_waveform_load(const char* path, leaf_waveform** out);
LEAF_API leaf_status leaf_waveform_from_samples(const double* samples, size_t n,
                                                int sample_rate, leaf_waveform** out);
LEAF_API void leaf_waveform_free(leaf_waveform* w);
LEAF_API size_t leaf_waveform_size(const leaf_waveform* w);

/* Feature extraction. model may be NULL to use the initialization state. */
LEAF_API leaf_status leaf_extract(const leaf_config* cfg, const leaf_model* model,
                                  const leaf_waveform* w, leaf_features** out);
LEAF_API void leaf_features_free(leaf_features* f);
LEAF_API size_t leaf_features_frames(const leaf_features* f);
LEAF_API size_t leaf_features_channels(const leaf_features* f);
LEAF_API double leaf_features_frame_rate(const leaf_features* f);
/* Time-major frames x channels values. */
LEAF_API const double* leaf_features_data(const leaf_features* f);
LEAF_API leaf_status leaf_features_write(const leaf_features* f, const char* path);
LEAF_API leaf_status leaf_features_read(const char* path, leaf_features** out);

/* Per-channel correlation between Gabor-at-init and mel features before
 * compression. Writes min(capacity, channels) values and the channel count. */
LEAF_API leaf_status leaf_mel_equivalence(const leaf_config* cfg, const leaf_waveform* w,
                                          double* out, size_t capacity, size_t* n_out);

/* Models. */
LEAF_API leaf_status leaf_model_load(const char* dir, leaf_model** out);
LEAF_API leaf_status leaf_model_save(const leaf_model* model, const char* dir);
LEAF_API void leaf_model_free(leaf_model* model);
LEAF_API leaf_status leaf_model_config(const leaf_model* model, leaf_config** out);
/* channel,center_hz,sigma,pool_width,alpha,delta,root,smooth */
LEAF_API leaf_status leaf_model_inspect_csv(const leaf_model* model, char** out);
/* channel,center_hz,sigma,fwhm for the initial Gabor bank of cfg. */
LEAF_API leaf_status leaf_bank_csv(const leaf_config* cfg, char** out);

typedef struct leaf_train_options {
  size_t steps;
  size_t batch_size;
  double lr;
  uint64_t seed;
  double clip_s;
  double snr_db; /* +inf for clean audio */
  size_t log_every;
  int freeze_frontend;
  double frontend_lr_scale; /* multiplies lr for frontend parameters */
} leaf_train_options;

LEAF_API leaf_train_options leaf_train_options_default(void);

/* tasks is a comma-separated list of pitch, am, noisecolor; task k gets head k.
 * When out_dir is not NULL, metrics.csv and snapshot_<step> model directories
 * are written there. Either out-parameter may be NULL. */
LEAF_API leaf_status leaf_train(const leaf_config* cfg, const char* tasks,
                                const leaf_train_options* options, const char* out_dir,
                                leaf_model** model_out, char** metrics_csv_out);

LEAF_API leaf_status leaf_evaluate(const leaf_model* model, const char* task, int task_id,
                                   double snr_db, size_t n_examples, uint64_t seed,
                                   double* accuracy, double* ci_half_width);

/* variant,param_group,max_rel_err,n_params */
LEAF_API leaf_status leaf_gradcheck(const leaf_config* cfg, uint64_t seed, char** csv_out);

LEAF_API leaf_status leaf_bootstrap(const double* acc_a, const double* acc_b, size_t n,
                                    size_t iters, uint64_t seed, double* mean_diff,
                                    double* p_value);

/* variants is a comma-separated list of preset names. */
LEAF_API leaf_status leaf_noise_sweep(const leaf_config* cfg, const char* task,
                                      const double* snr_db, size_t n_snr,
                                      const char* variants,
                                      const leaf_train_options* options,
                                      size_t eval_examples, size_t seeds, uint64_t seed,
                                      char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* LEAF_LEAF_H_ */
