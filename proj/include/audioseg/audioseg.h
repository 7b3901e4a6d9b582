/* Copyright 2026 The audioseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
/* C interface to audioseg.
 *
 * Every call that can fail returns an as_status and leaves a message in
 * its context, readable with as_last_error() until the next call on that
 * context. A context is not safe for concurrent use; separate contexts
 * are independent. Strings passed in are UTF-8 paths or tags and are
 * copied before the call returns. */
#ifndef AUDIOSEG_AUDIOSEG_H_
#define AUDIOSEG_AUDIOSEG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AUDIOSEG_API __declspec(dllexport)
#else
#define AUDIOSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum as_status {
  AS_OK = 0,
  AS_ERR_USAGE = 1,   /* bad arguments or configuration */
  AS_ERR_DATA = 2,    /* unreadable, missing or malformed data */
  AS_ERR_NUMERIC = 3  /* non-finite values during training */
} as_status;

typedef struct as_context as_context;
typedef struct as_segmenter as_segmenter;
typedef struct as_prediction as_prediction;

typedef void (*as_log_fn)(void* user, const char* message);

AUDIOSEG_API const char* as_version(void);
AUDIOSEG_API const char* as_status_name(as_status status);

/* Contexts carry the run configuration, overrides and the last error. */
AUDIOSEG_API as_status as_context_create(as_context** out);
AUDIOSEG_API void as_context_destroy(as_context* ctx);
AUDIOSEG_API const char* as_last_error(const as_context* ctx);
AUDIOSEG_API void as_set_log_callback(as_context* ctx, as_log_fn fn, void* user);

/* Replaces the run configuration. Only the JSON syntax is checked here;
 * keys are checked with the overrides applied, by as_validate_config or
 * the first call that uses them. Relative paths resolve against the
 * file's directory (for as_set_config_json, against base_dir). */
AUDIOSEG_API as_status as_load_config(as_context* ctx, const char* path);
AUDIOSEG_API as_status as_set_config_json(as_context* ctx, const char* json_text,
                                          const char* base_dir);
/* Overrides that take precedence over the configuration. */
AUDIOSEG_API as_status as_set_seed(as_context* ctx, uint64_t seed);
AUDIOSEG_API as_status as_set_threads(as_context* ctx, size_t threads);
AUDIOSEG_API as_status as_set_generator_checkpoint(as_context* ctx, const char* task,
                                                   const char* checkpoint_dir);
/* Parses the configuration with overrides applied; on failure the error
 * lists every violation with its key path. */
AUDIOSEG_API as_status as_validate_config(as_context* ctx);
/* 16 hex digits identifying the effective configuration. The buffer must
 * hold at least 17 bytes. */
AUDIOSEG_API as_status as_config_hash(as_context* ctx, char* out, size_t capacity);

/* Every *.wav below in_dir becomes a [n, 128, 87] TNSR stack below
 * out_dir: one-second chunks, or with fit_one_second set, the whole clip
 * padded or truncated to one second. */
AUDIOSEG_API as_status as_preprocess(as_context* ctx, const char* in_dir, const char* out_dir,
                                     int fit_one_second, size_t* n_files);

/* Synthesizes a corpus from the configuration's corpus section. Negative
 * shows/topics/show_seconds and audio_informative keep the configured
 * values. */
AUDIOSEG_API as_status as_make_corpus(as_context* ctx, const char* out_dir, int shows, int topics,
                                      double show_seconds, int audio_informative);

/* Trains a "sec", "fpc" or "wc" generator. data_manifest lists audio files
 * (see the README); NULL builds the synthetic recipe from the
 * configuration. val_accuracy may be NULL. */
AUDIOSEG_API as_status as_train_generator(as_context* ctx, const char* task,
                                          const char* data_manifest, const char* out_dir,
                                          double* val_accuracy);

/* Every spectrogram stack (*.tnsr) or clip (*.wav) below in_dir becomes a
 * [n, 30] embedding TNSR below out_dir. */
AUDIOSEG_API as_status as_embed(as_context* ctx, const char* checkpoint_dir, const char* in_dir,
                                const char* out_dir, size_t* n_files);

/* Trains a segmenter for a feature tag such as "txt+sec" on the corpus
 * train and validation shows and writes a self-contained bundle.
 * Generators come from as_set_generator_checkpoint or the configured
 * recipes. val_f1 may be NULL. */
AUDIOSEG_API as_status as_train_segmenter(as_context* ctx, const char* corpus_dir,
                                          const char* features, const char* out_dir,
                                          double* val_f1);

AUDIOSEG_API as_status as_segmenter_load(as_context* ctx, const char* bundle_dir,
                                         as_segmenter** out);
AUDIOSEG_API void as_segmenter_destroy(as_segmenter* seg);
/* Feature tag of the loaded model, e.g. "TXT+SEC". */
AUDIOSEG_API const char* as_segmenter_features(const as_segmenter* seg);
AUDIOSEG_API as_status as_segmenter_predict(as_context* ctx, const as_segmenter* seg,
                                            const char* show_dir, as_prediction** out);

AUDIOSEG_API size_t as_prediction_length(const as_prediction* p);
AUDIOSEG_API const double* as_prediction_probs(const as_prediction* p);
AUDIOSEG_API const uint8_t* as_prediction_boundaries(const as_prediction* p);
/* One JSON object per token: {"index", "prob", "boundary"}. */
AUDIOSEG_API as_status as_prediction_write(as_context* ctx, const as_prediction* p,
                                           const char* path);
AUDIOSEG_API void as_prediction_destroy(as_prediction* p);

/* Scores prediction files (or directories of *.jsonl), each named after
 * its show id, against a corpus and writes results.tsv. */
AUDIOSEG_API as_status as_eval(as_context* ctx, const char* const* predictions,
                               size_t n_predictions, const char* corpus_dir, size_t k,
                               const char* method, const char* out_tsv);

/* Significance tests of a results.tsv against the baseline method; alpha
 * levels come from the configuration. */
AUDIOSEG_API as_status as_stats(as_context* ctx, const char* results_tsv, const char* baseline,
                                const char* out_json);

/* Runs the full experiment and writes results.tsv, report.json and
 * report.md to output_dir (NULL: the configured output). */
AUDIOSEG_API as_status as_run(as_context* ctx, const char* output_dir);

#ifdef __cplusplus
}
#endif

#endif /* AUDIOSEG_AUDIOSEG_H_ */
