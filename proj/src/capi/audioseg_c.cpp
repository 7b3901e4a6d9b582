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

#include "audioseg/audioseg.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <map>
#include <mutex>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audioseg/corpus/benchmark.hpp"
#include "audioseg/error.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/pipeline/bundle.hpp"
#include "audioseg/pipeline/config.hpp"
#include "audioseg/pipeline/experiment.hpp"
#include "audioseg/pipeline/results.hpp"
#include "audioseg/pipeline/stages.hpp"
#include "audioseg/runtime.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace audioseg;

struct as_context {
  json doc = json::object();
  fs::path base = fs::current_path();
  std::optional<uint64_t> seed;
  std::optional<size_t> threads;
  std::map<std::string, fs::path> checkpoints;
  std::string last_error;
  as_log_fn log_fn = nullptr;
  void* log_user = nullptr;
};

struct as_segmenter {
  pipeline::SegmenterBundle bundle;
  std::string tag;
};

struct as_prediction {
  segmenter::Prediction p;
};

namespace {

const char* require(const char* s, const char* name) {
  if (!s || !*s) throw UsageError(std::string(name) + " must be a non-empty string");
  return s;
}

template <typename T>
T* require(T* p, const char* name) {
  if (!p) throw UsageError(std::string(name) + " must not be NULL");
  return p;
}

template <typename F>
as_status guard(as_context* ctx, F&& body) {
  if (!ctx) return AS_ERR_USAGE;
  ctx->last_error.clear();
  try {
    body();
    return AS_OK;
  } catch (const Error& e) {
    ctx->last_error = e.what();
    return static_cast<as_status>(static_cast<int>(e.kind()));
  } catch (const fs::filesystem_error& e) {
    ctx->last_error = e.what();
    return AS_ERR_DATA;
  } catch (const std::bad_alloc&) {
    ctx->last_error = "out of memory";
    return AS_ERR_DATA;
  } catch (const std::exception& e) {
    ctx->last_error = std::string("unexpected failure: ") + e.what();
    return AS_ERR_DATA;
  }
}

pipeline::Logger logger(const as_context* ctx) {
  if (!ctx->log_fn) return {};
  return [fn = ctx->log_fn, user = ctx->log_user](const std::string& m) { fn(user, m.c_str()); };
}

// The configuration document with the overrides applied, parsed.
pipeline::RunConfig effective(const as_context* ctx, json doc) {
  if (ctx->seed) doc["seed"] = *ctx->seed;
  if (ctx->threads) doc["threads"] = *ctx->threads;
  for (const auto& [task, dir] : ctx->checkpoints) {
    doc["generators"][task]["checkpoint"] = dir.string();
  }
  return pipeline::parse_run_config(doc.dump(), ctx->base);
}

pipeline::RunConfig effective(const as_context* ctx) { return effective(ctx, ctx->doc); }

// Syntax only; keys are checked once overrides are applied.
json parse_document(const std::string& text, const std::string& what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(what + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError(what + ": expected a JSON object");
  return doc;
}

fs::path absolute(const char* p) { return fs::absolute(fs::path(p)).lexically_normal(); }

}  // namespace

extern "C" {

const char* as_version(void) { return "0.1.0"; }

const char* as_status_name(as_status status) {
  switch (status) {
    case AS_OK: return "ok";
    case AS_ERR_USAGE: return "usage error";
    case AS_ERR_DATA: return "data error";
    case AS_ERR_NUMERIC: return "numeric failure";
  }
  return "unknown status";
}

as_status as_context_create(as_context** out) {
  if (!out) return AS_ERR_USAGE;
  static std::once_flag once;
  std::call_once(once, configure_allocator);
  *out = new (std::nothrow) as_context();
  return *out ? AS_OK : AS_ERR_DATA;
}

void as_context_destroy(as_context* ctx) { delete ctx; }

const char* as_last_error(const as_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "context is NULL";
}

void as_set_log_callback(as_context* ctx, as_log_fn fn, void* user) {
  if (!ctx) return;
  ctx->log_fn = fn;
  ctx->log_user = user;
}

as_status as_load_config(as_context* ctx, const char* path) {
  return guard(ctx, [&] {
    const fs::path file = absolute(require(path, "path"));
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    ctx->doc = parse_document(text.str(), file.string());
    ctx->base = file.parent_path();
  });
}

as_status as_set_config_json(as_context* ctx, const char* json_text, const char* base_dir) {
  return guard(ctx, [&] {
    ctx->doc = parse_document(require(json_text, "json_text"), "configuration");
    ctx->base = base_dir ? absolute(base_dir) : fs::current_path();
  });
}

as_status as_set_seed(as_context* ctx, uint64_t seed) {
  return guard(ctx, [&] { ctx->seed = seed; });
}

as_status as_set_threads(as_context* ctx, size_t threads) {
  return guard(ctx, [&] {
    if (threads < 1) throw UsageError("threads must be at least 1");
    ctx->threads = threads;
  });
}

as_status as_set_generator_checkpoint(as_context* ctx, const char* task, const char* checkpoint_dir) {
  return guard(ctx, [&] {
    const auto t = generator::parse_task(require(task, "task"));
    if (t == generator::TaskTag::kCustom) throw UsageError("task must be sec, fpc or wc");
    ctx->checkpoints[generator::task_name(t)] = absolute(require(checkpoint_dir, "checkpoint_dir"));
  });
}

as_status as_validate_config(as_context* ctx) {
  return guard(ctx, [&] { effective(ctx); });
}

as_status as_config_hash(as_context* ctx, char* out, size_t capacity) {
  return guard(ctx, [&] {
    require(out, "out");
    if (capacity < 17) throw UsageError("hash buffer needs 17 bytes");
    const auto h = effective(ctx).hash();
    std::copy(h.begin(), h.end(), out);
    out[h.size()] = '\0';
  });
}

as_status as_preprocess(as_context* ctx, const char* in_dir, const char* out_dir,
                        int fit_one_second, size_t* n_files) {
  return guard(ctx, [&] {
    const size_t n = pipeline::preprocess_dir(
        absolute(require(in_dir, "in_dir")), absolute(require(out_dir, "out_dir")),
        fit_one_second ? pipeline::ClipMode::kFit : pipeline::ClipMode::kChunk);
    if (n_files) *n_files = n;
  });
}

as_status as_make_corpus(as_context* ctx, const char* out_dir, int shows, int topics,
                         double show_seconds, int audio_informative) {
  return guard(ctx, [&] {
    auto cfg = effective(ctx).corpus;
    if (shows >= 0) cfg.n_shows = shows;
    if (topics >= 0) cfg.n_topics = topics;
    if (show_seconds >= 0) cfg.show_seconds = show_seconds;
    if (audio_informative >= 0) cfg.audio_informative = audio_informative != 0;
    // An explicit seed override wins over a seed in the corpus section.
    if (ctx->seed) cfg.seed = *ctx->seed;
    const auto m = corpus::make_benchmark(cfg, absolute(require(out_dir, "out_dir")));
    if (ctx->log_fn) {
      ctx->log_fn(ctx->log_user, ("corpus: " + std::to_string(m.shows.size()) + " shows, config " +
                                  m.config_hash).c_str());
    }
  });
}

as_status as_train_generator(as_context* ctx, const char* task, const char* data_manifest,
                             const char* out_dir, double* val_accuracy) {
  return guard(ctx, [&] {
    const auto cfg = effective(ctx);
    const auto t = generator::parse_task(require(task, "task"));
    if (t == generator::TaskTag::kCustom) throw UsageError("task must be sec, fpc or wc");
    const auto tc = pipeline::training_config(cfg, t);
    const auto log = logger(ctx);
    generator::LabeledClipDataset ds;
    json source;
    if (data_manifest && *data_manifest) {
      ds = pipeline::load_clip_manifest(absolute(data_manifest), tc.seed);
      if (ds.task != t) {
        throw UsageError(std::string("manifest holds a ") + generator::task_name(ds.task) +
                         " dataset, not " + task);
      }
      source = {{"manifest", fs::path(data_manifest).filename().string()}};
    } else {
      ds = pipeline::recipe_dataset(cfg, t);
      source = {{"recipe", json::parse(cfg.generator_json(t))}, {"corpus", cfg.corpus.hash()}};
    }
    if (log) log("generator: training on " + std::to_string(ds.size()) + " items");
    auto result = generator::train_generator(ds, tc, [&](const generator::EpochLog& e) {
      if (log) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "epoch %d loss %.4f train %.3f val %.3f", e.epoch,
                      e.train_loss, e.train_accuracy, e.val_accuracy);
        log(buf);
      }
      return true;
    });
    result.model.config_json =
        json({{"data", source}, {"train", json::parse(tc.to_json())}}).dump();
    generator::save_generator(result.model, absolute(require(out_dir, "out_dir")));
    if (val_accuracy) *val_accuracy = result.model.val_accuracy;
  });
}

as_status as_embed(as_context* ctx, const char* checkpoint_dir, const char* in_dir,
                   const char* out_dir, size_t* n_files) {
  return guard(ctx, [&] {
    const auto cfg = effective(ctx);
    const auto model = generator::load_generator(absolute(require(checkpoint_dir, "checkpoint_dir")));
    const size_t n = pipeline::embed_dir(model, absolute(require(in_dir, "in_dir")),
                                         absolute(require(out_dir, "out_dir")), cfg.threads);
    if (n_files) *n_files = n;
  });
}

as_status as_train_segmenter(as_context* ctx, const char* corpus_dir, const char* features,
                             const char* out_dir, double* val_f1) {
  return guard(ctx, [&] {
    const auto method = segmenter::FeatureConfig::parse(require(features, "features"));
    const fs::path corpus = absolute(require(corpus_dir, "corpus_dir"));
    corpus::load_manifest(corpus);  // an unreadable corpus is a data error
    json doc = ctx->doc;
    doc["corpus"] = corpus.string();
    doc["methods"] = json::array({method.tag()});
    const auto cfg = effective(ctx, doc);
    const auto model =
        pipeline::train_method(cfg, method, absolute(require(out_dir, "out_dir")), logger(ctx));
    if (val_f1) *val_f1 = model.val_f1;
  });
}

as_status as_segmenter_load(as_context* ctx, const char* bundle_dir, as_segmenter** out) {
  return guard(ctx, [&] {
    require(out, "out");
    *out = nullptr;
    auto seg = std::make_unique<as_segmenter>();
    seg->bundle = pipeline::load_bundle(absolute(require(bundle_dir, "bundle_dir")));
    seg->tag = seg->bundle.model.features.tag();
    *out = seg.release();
  });
}

void as_segmenter_destroy(as_segmenter* seg) { delete seg; }

const char* as_segmenter_features(const as_segmenter* seg) { return seg ? seg->tag.c_str() : ""; }

as_status as_segmenter_predict(as_context* ctx, const as_segmenter* seg, const char* show_dir,
                               as_prediction** out) {
  return guard(ctx, [&] {
    require(seg, "segmenter");
    require(out, "out");
    *out = nullptr;
    const size_t threads = ctx->threads.value_or(1);
    const auto show = corpus::load_show(absolute(require(show_dir, "show_dir")));
    auto p = std::make_unique<as_prediction>();
    p->p = seg->bundle.predict(show, threads);
    *out = p.release();
  });
}

size_t as_prediction_length(const as_prediction* p) { return p ? p->p.probs.size() : 0; }

const double* as_prediction_probs(const as_prediction* p) { return p ? p->p.probs.data() : nullptr; }

const uint8_t* as_prediction_boundaries(const as_prediction* p) {
  return p ? p->p.boundaries.data() : nullptr;
}

as_status as_prediction_write(as_context* ctx, const as_prediction* p, const char* path) {
  return guard(ctx, [&] {
    require(p, "prediction");
    const fs::path file = absolute(require(path, "path"));
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << pipeline::predictions_jsonl(p->p);
    if (!out) throw DataError("cannot write " + file.string());
  });
}

void as_prediction_destroy(as_prediction* p) { delete p; }

as_status as_eval(as_context* ctx, const char* const* predictions, size_t n_predictions,
                  const char* corpus_dir, size_t k, const char* method, const char* out_tsv) {
  return guard(ctx, [&] {
    if (n_predictions > 0) require(predictions, "predictions");
    std::vector<fs::path> paths;
    for (size_t i = 0; i < n_predictions; ++i) paths.push_back(absolute(require(predictions[i], "prediction path")));
    if (k < 1) throw UsageError("k must be at least 1");
    std::optional<uint64_t> seed = ctx->seed;
    if (!seed && ctx->doc.contains("seed")) seed = effective(ctx).seed;
    const auto table = pipeline::evaluate_predictions(pipeline::expand_prediction_paths(paths),
                                                      absolute(require(corpus_dir, "corpus_dir")), k,
                                                      require(method, "method"), seed);
    pipeline::write_results_tsv(absolute(require(out_tsv, "out_tsv")), table);
  });
}

as_status as_stats(as_context* ctx, const char* results_tsv, const char* baseline,
                   const char* out_json) {
  return guard(ctx, [&] {
    const auto cfg = effective(ctx);
    const auto table = pipeline::read_results_tsv(absolute(require(results_tsv, "results_tsv")));
    const auto methods = table.methods();
    // Method labels need not be feature tags; "txt" still finds "TXT".
    std::string label = require(baseline, "baseline");
    if (std::find(methods.begin(), methods.end(), label) == methods.end()) {
      label = segmenter::FeatureConfig::parse(label).tag();
    }
    const auto report = pipeline::run_stats(table, label, cfg.stats.alphas);
    const fs::path out = absolute(require(out_json, "out_json"));
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    f << pipeline::stats_json(report, table.seed, table.config_hash);
    if (!f) throw DataError("cannot write " + out.string());
  });
}

as_status as_run(as_context* ctx, const char* output_dir) {
  return guard(ctx, [&] {
    const auto cfg = effective(ctx);
    const auto report = pipeline::run_experiment(cfg, logger(ctx));
    const fs::path out = output_dir && *output_dir ? absolute(output_dir) : cfg.output;
    pipeline::write_experiment(report, out);
  });
}

}  // extern "C"
