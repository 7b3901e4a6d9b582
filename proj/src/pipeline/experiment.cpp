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

#include "audioseg/pipeline/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audioseg/corpus/clips.hpp"
#include "audioseg/dsp/wav.hpp"
#include "audioseg/eval/winpr.hpp"
#include "audioseg/nn/tnsr.hpp"
#include "audioseg/pipeline/bundle.hpp"
#include "audioseg/random.hpp"

namespace audioseg::pipeline {
namespace fs = std::filesystem;
using json = nlohmann::json;
using generator::TaskTag;
using segmenter::FeatureConfig;
using segmenter::FeatureMatrix;

namespace {

// Seed streams of the synthetic generator recipes.
constexpr uint64_t kClipStream = 0x636c697073;   // "clips"
constexpr uint64_t kTrainStream = 0x747261696e;  // "train"
constexpr uint64_t kJingleStream = 0x6a696e676c;
constexpr uint64_t kSplitStream = 0x73706c6974;

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t task_seed(uint64_t seed, TaskTag task, uint64_t stream) {
  return mix_seed(mix_seed(seed, stream), fnv1a64(generator::task_name(task)));
}

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw DataError("cannot write " + path.string());
}

// Builds a cache entry in a scratch directory and renames it into place,
// so an interrupted stage never leaves a half-written entry behind.
void publish_dir(const fs::path& dir, const std::function<void(const fs::path&)>& build) {
  fs::path scratch = dir;
  scratch += ".partial";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  build(scratch);
  fs::remove_all(dir);
  fs::rename(scratch, dir);
}

std::string stage_of(const json& config) {
  return config.is_object() ? config.value("stage", std::string()) : std::string();
}

corpus::Vocabulary vocabulary(const RunConfig& cfg) { return corpus::make_vocabulary(cfg.corpus); }

std::vector<std::string> wc_words(const RunConfig& cfg) {
  const auto vocab = vocabulary(cfg);
  std::vector<std::string> words;
  size_t total = 0;
  for (const auto& t : vocab.topical) total += t.size();
  if (size_t(cfg.wc.words) > total) {
    throw UsageError("generators.wc.words: the corpus vocabulary has only " +
                     std::to_string(total) + " topical words");
  }
  for (size_t i = 0; words.size() < size_t(cfg.wc.words); ++i) {
    for (const auto& t : vocab.topical) {
      if (i < t.size() && words.size() < size_t(cfg.wc.words)) words.push_back(t[i]);
    }
  }
  return words;
}

// Audio embeddings of every show for one generator, cached per show.
class FeatureCache {
 public:
  FeatureCache(const RunConfig& cfg, TaskTag task, const std::string& generator_key)
      : dir_(cfg.cache / "features" / (generator::task_name(task) + "-" + generator_key)),
        seed_(cfg.seed),
        key_(generator_key),
        task_(task) {}

  FeatureMatrix get(const std::string& show_id, const corpus::Show& show,
                    const generator::GeneratorModel& model, size_t threads) {
    const fs::path file = dir_ / (show_id + ".tnsr");
    if (fs::is_regular_file(file)) {
      auto d = nn::read_tnsr(file);
      if (d.shape.size() != 2 || d.shape[0] != show.tokens.size() ||
          d.shape[1] != generator::kEmbeddingDim) {
        throw DataError("cached features " + file.string() + " do not match the show");
      }
      ++reused_;
      return {d.shape[0], d.shape[1], std::vector<float>(d.values.begin(), d.values.end())};
    }
    ensure_meta();
    auto m = segmenter::audio_block(show, model, threads);
    fs::path scratch = file;
    scratch += ".partial";
    nn::write_tnsr(scratch, {m.rows, m.cols}, std::span<const float>(m.values));
    fs::rename(scratch, file);
    ++computed_;
    return m;
  }

  size_t reused() const { return reused_; }
  size_t computed() const { return computed_; }

 private:
  void ensure_meta() {
    if (meta_written_) return;
    fs::create_directories(dir_);
    write_json(dir_ / "meta.json", {{"format", "audioseg-features"},
                                    {"task", generator::task_name(task_)},
                                    {"stage", key_},
                                    {"seed", seed_}});
    meta_written_ = true;
  }

  fs::path dir_;
  uint64_t seed_;
  std::string key_;
  TaskTag task_;
  bool meta_written_ = false;
  size_t reused_ = 0;
  size_t computed_ = 0;
};

struct ShowData {
  corpus::ManifestEntry entry;
  corpus::Show show;
  FeatureMatrix text;
  std::map<TaskTag, FeatureMatrix> audio;
};

FeatureMatrix method_features(const ShowData& s, const FeatureConfig& f) {
  std::vector<const FeatureMatrix*> blocks;
  if (f.text) blocks.push_back(&s.text);
  for (TaskTag t : f.audio_tasks()) blocks.push_back(&s.audio.at(t));
  return segmenter::concat_blocks(blocks);
}

}  // namespace

void run_stage(const std::string& name, const std::function<void()>& body) {
  const std::string prefix = "stage " + name + ": ";
  try {
    body();
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::kUsage: throw UsageError(prefix + e.what());
      case ErrorKind::kData: throw DataError(prefix + e.what());
      case ErrorKind::kNumeric: throw NumericError(prefix + e.what());
    }
    throw;
  } catch (const fs::filesystem_error& e) {
    throw DataError(prefix + e.what());
  }
}

corpus::CorpusManifest ensure_corpus(const RunConfig& cfg, const Logger& log) {
  if (!cfg.corpus_path.empty()) {
    say(log, "corpus: using " + cfg.corpus_path.string());
    return corpus::load_manifest(cfg.corpus_path);
  }
  const std::string hash = cfg.corpus.hash();
  const fs::path dir = cfg.cache / "corpus" / hash;
  if (fs::is_regular_file(dir / "manifest.json")) {
    auto m = corpus::load_manifest(dir);
    if (m.config_hash != hash) {
      throw DataError("cached corpus " + dir.string() + " has config " + m.config_hash +
                      ", expected " + hash);
    }
    say(log, "corpus: reusing " + hash);
    return m;
  }
  say(log, "corpus: synthesizing " + std::to_string(cfg.corpus.n_shows) + " shows (" + hash + ")");
  publish_dir(dir, [&](const fs::path& scratch) { corpus::make_benchmark(cfg.corpus, scratch); });
  return corpus::load_manifest(dir);
}

segmenter::WordEmbedder make_embedder(const RunConfig& cfg, const corpus::CorpusManifest& corpus) {
  if (cfg.text_embeddings == "hash") return {};
  fs::path table = cfg.text_table;
  if (cfg.text_embeddings == "corpus") table = corpus.word_vectors;
  if (table.empty()) throw DataError("text.embeddings: the corpus ships no word-vector table");
  return segmenter::WordEmbedder::from_file(table);
}

generator::LabeledClipDataset recipe_dataset(const RunConfig& cfg, TaskTag task) {
  const uint64_t seed = task_seed(cfg.seed, task, kClipStream);
  generator::LabeledClipDataset ds;
  switch (task) {
    case TaskTag::kSec: {
      const auto clips = corpus::make_sound_event_clips(cfg.sec.classes, cfg.sec.clips_per_class,
                                                        cfg.sec.clip_seconds, seed);
      ds = generator::build_sec_dataset(clips);
      break;
    }
    case TaskTag::kFpc: {
      const auto vocab = vocabulary(cfg);
      std::vector<dsp::Waveform> fragments;
      for (int f = 0; f < cfg.fpc.fragments; ++f) {
        const auto spec = corpus::topic_spec(cfg.corpus, vocab, f % cfg.corpus.n_topics,
                                             cfg.fpc.fragment_seconds);
        fragments.push_back(corpus::synth_fragment(spec, mix_seed(seed, uint64_t(f))).audio);
      }
      const auto jingles = corpus::make_jingles(cfg.fpc.jingles, cfg.fpc.jingle_seconds,
                                                mix_seed(seed, kJingleStream));
      generator::FpcOptions opt;
      opt.seed = mix_seed(seed, kSplitStream);
      opt.per_class_cap = cfg.fpc.per_class_cap;
      ds = generator::build_fpc_dataset(fragments, jingles, opt);
      break;
    }
    case TaskTag::kWc: {
      const auto clips = corpus::make_word_clips(wc_words(cfg), cfg.wc.clips_per_word,
                                                 cfg.corpus.n_topics, cfg.corpus.word_min_s,
                                                 cfg.corpus.word_max_s, seed);
      ds = generator::build_wc_dataset(clips);
      break;
    }
    case TaskTag::kCustom:
      throw UsageError("recipe_dataset: custom tasks have no recipe");
  }
  ds.task = task;
  return ds;
}

generator::LabeledClipDataset load_clip_manifest(const fs::path& path, uint64_t seed) {
  const json m = read_json(path);
  const fs::path base = path.parent_path();
  try {
    const TaskTag task = generator::parse_task(m.at("task").get<std::string>());
    if (task == TaskTag::kFpc) {
      std::vector<dsp::Waveform> fragments, jingles;
      for (const auto& f : m.at("fragments")) fragments.push_back(dsp::load_wav(base / f.get<std::string>()));
      for (const auto& f : m.at("jingles")) jingles.push_back(dsp::load_wav(base / f.get<std::string>()));
      generator::FpcOptions opt;
      opt.seed = seed;
      return generator::build_fpc_dataset(fragments, jingles, opt);
    }
    if (task == TaskTag::kCustom) throw DataError("custom tasks are not supported");
    corpus::LabeledClips clips;
    std::set<std::string> names;
    for (const auto& item : m.at("items")) names.insert(item.at("label").get<std::string>());
    clips.class_names.assign(names.begin(), names.end());
    for (const auto& item : m.at("items")) {
      const auto label = item.at("label").get<std::string>();
      clips.clips.push_back(dsp::load_wav(base / item.at("path").get<std::string>()));
      clips.labels.push_back(size_t(
          std::lower_bound(clips.class_names.begin(), clips.class_names.end(), label) -
          clips.class_names.begin()));
    }
    auto ds = task == TaskTag::kSec ? generator::build_sec_dataset(clips)
                                    : generator::build_wc_dataset(clips);
    ds.task = task;
    return ds;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

generator::TrainConfig training_config(const RunConfig& cfg, TaskTag task) {
  const GeneratorTraining* t = nullptr;
  switch (task) {
    case TaskTag::kSec: t = &cfg.sec.train; break;
    case TaskTag::kFpc: t = &cfg.fpc.train; break;
    case TaskTag::kWc: t = &cfg.wc.train; break;
    case TaskTag::kCustom: t = &cfg.sec.train; break;
  }
  generator::TrainConfig tc;
  tc.epochs = t->epochs;
  tc.batch_size = t->batch_size;
  tc.lr = t->lr;
  tc.val_fraction = t->val_fraction;
  tc.seed = task_seed(cfg.seed, task, kTrainStream);
  return tc;
}

std::string generator_key(const RunConfig& cfg, TaskTag task) {
  json j = json::parse(cfg.generator_json(task));
  j["seed"] = cfg.seed;
  // FPC fragments and WC words come from the corpus vocabulary.
  if (task != TaskTag::kSec) j["corpus"] = cfg.corpus.hash();
  return hex64(fnv1a64(j.dump()));
}

generator::GeneratorModel ensure_generator(const RunConfig& cfg, TaskTag task, const Logger& log) {
  const std::string name = generator::task_name(task);
  const fs::path* checkpoint = task == TaskTag::kSec   ? &cfg.sec.checkpoint
                               : task == TaskTag::kFpc ? &cfg.fpc.checkpoint
                                                       : &cfg.wc.checkpoint;
  if (!checkpoint->empty()) {
    say(log, "generator " + name + ": loading " + checkpoint->string());
    auto model = generator::load_generator(*checkpoint);
    if (model.task != task) {
      throw DataError(checkpoint->string() + " holds a " + generator::task_name(model.task) +
                      " generator, not " + name);
    }
    return model;
  }
  const std::string key = generator_key(cfg, task);
  const fs::path dir = cfg.cache / "generators" / (name + "-" + key);
  if (fs::is_regular_file(dir / "meta.json")) {
    auto model = generator::load_generator(dir);
    if (stage_of(json::parse(model.config_json)) != key) {
      throw DataError("cached generator " + dir.string() + " does not match its key");
    }
    say(log, "generator " + name + ": reusing " + key);
    return model;
  }
  say(log, "generator " + name + ": building the training set");
  const auto ds = recipe_dataset(cfg, task);
  const auto tc = training_config(cfg, task);
  say(log, "generator " + name + ": training on " + std::to_string(ds.size()) + " items for " +
               std::to_string(tc.epochs) + " epochs");
  auto result = generator::train_generator(ds, tc, [&](const generator::EpochLog& e) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "generator %s: epoch %d loss %.4f train %.3f val %.3f",
                  name.c_str(), e.epoch, e.train_loss, e.train_accuracy, e.val_accuracy);
    say(log, buf);
    return true;
  });
  auto& model = result.model;
  model.config_json = json({{"stage", key},
                            {"recipe", json::parse(cfg.generator_json(task))},
                            {"train", json::parse(tc.to_json())}})
                          .dump();
  publish_dir(dir, [&](const fs::path& scratch) { generator::save_generator(model, scratch); });
  return model;
}

namespace {

// Corpus shows with every feature block some method needs.
struct Workspace {
  corpus::CorpusManifest manifest;
  std::vector<ShowData> shows;
  std::map<TaskTag, generator::GeneratorModel> generators;
  std::map<TaskTag, std::string> generator_keys;
};

Workspace prepare(const RunConfig& cfg, bool text, const std::vector<TaskTag>& tasks,
                  const Logger& log) {
  Workspace ws;
  run_stage("corpus", [&] {
    ws.manifest = ensure_corpus(cfg, log);
    for (const auto& e : ws.manifest.shows) {
      ws.shows.push_back({e, corpus::load_show(e.dir), {}, {}});
    }
  });
  if (text) {
    run_stage("features:text", [&] {
      const auto words = make_embedder(cfg, ws.manifest);
      for (auto& s : ws.shows) s.text = segmenter::text_block(s.show, words);
    });
  }
  for (TaskTag task : tasks) {
    const std::string name = generator::task_name(task);
    run_stage("generator:" + name, [&] { ws.generators[task] = ensure_generator(cfg, task, log); });
    const std::string key = generator_key(cfg, task);
    ws.generator_keys[task] = key;
    run_stage("features:" + name, [&] {
      FeatureCache cache(cfg, task, key);
      for (auto& s : ws.shows) {
        s.audio[task] = cache.get(s.entry.id, s.show, ws.generators[task], cfg.threads);
      }
      say(log, "features " + name + ": " + std::to_string(cache.computed()) + " computed, " +
                   std::to_string(cache.reused()) + " reused");
    });
  }
  return ws;
}

// Trains the method on the train/val shows, or loads it from the cache.
segmenter::SegmenterModel fit_method(const RunConfig& cfg, const Workspace& ws,
                                     const FeatureConfig& method, const Logger& log) {
  const std::string tag = method.tag();
  std::vector<segmenter::LabeledSequence> train, val;
  for (const auto& s : ws.shows) {
    if (s.entry.split == corpus::Split::kTest) continue;
    auto seq = segmenter::label_sequence(s.show, method_features(s, method));
    (s.entry.split == corpus::Split::kTrain ? train : val).push_back(std::move(seq));
  }

  json key = {{"method", tag},
              {"segmenter", json::parse(cfg.segmenter.to_json())},
              {"corpus", cfg.corpus.hash()},
              {"seed", cfg.seed}};
  if (method.text) key["text"] = json::parse(cfg.to_json()).at("text");
  for (TaskTag t : method.audio_tasks()) key[generator::task_name(t)] = ws.generator_keys.at(t);
  const std::string seg_key = hex64(fnv1a64(key.dump()));
  const fs::path dir = cfg.cache / "segmenters" / (tag + "-" + seg_key);

  if (fs::is_regular_file(dir / "meta.json")) {
    auto model = segmenter::load_segmenter(dir);
    if (stage_of(json::parse(model.config_json)) != seg_key) {
      throw DataError("cached segmenter " + dir.string() + " does not match its key");
    }
    say(log, "segmenter " + tag + ": reusing " + seg_key);
    return model;
  }
  say(log, "segmenter " + tag + ": grid search over " + std::to_string(train.size()) +
               " training shows");
  auto result = segmenter::train_segmenter(train, val, method, cfg.segmenter);
  auto model = std::move(result.model);
  model.config_json = json({{"stage", seg_key}, {"train", json::parse(model.config_json)}}).dump();
  publish_dir(dir, [&](const fs::path& scratch) { segmenter::save_segmenter(model, scratch); });
  return model;
}

}  // namespace

segmenter::SegmenterModel train_method(const RunConfig& cfg, const FeatureConfig& method,
                                       const fs::path& bundle_dir, const Logger& log) {
  if (method.empty()) throw UsageError("train_method: no feature blocks selected");
  const auto ws = prepare(cfg, method.text, method.audio_tasks(), log);
  segmenter::SegmenterModel model;
  run_stage("segmenter:" + method.tag(), [&] { model = fit_method(cfg, ws, method, log); });
  run_stage("bundle", [&] {
    std::map<TaskTag, const generator::GeneratorModel*> gens;
    for (const auto& [t, g] : ws.generators) gens[t] = &g;
    fs::path table;
    if (method.text && cfg.text_embeddings != "hash") {
      table = cfg.text_embeddings == "corpus" ? ws.manifest.word_vectors : cfg.text_table;
    }
    publish_dir(bundle_dir, [&](const fs::path& scratch) { save_bundle(scratch, model, table, gens); });
  });
  return model;
}

ExperimentReport run_experiment(const RunConfig& cfg, const Logger& log) {
  const auto methods = cfg.feature_configs();
  const auto ws = prepare(cfg, cfg.needs_text(), cfg.needed_generators(), log);

  ExperimentReport report;
  report.seed = cfg.seed;
  report.config_hash = cfg.hash();
  report.baseline = cfg.stats.baseline;
  report.window_k = cfg.segmenter.window_k;
  report.results.seed = cfg.seed;
  report.results.config_hash = report.config_hash;

  for (const auto& method : methods) {
    const std::string tag = method.tag();
    run_stage("segmenter:" + tag, [&] {
      const auto model = fit_method(cfg, ws, method, log);
      std::vector<eval::Boundaries> preds, refs;
      std::vector<std::string> ids;
      for (const auto& s : ws.shows) {
        if (s.entry.split != corpus::Split::kTest) continue;
        preds.push_back(segmenter::predict(model, method_features(s, method)).boundaries);
        refs.push_back(s.show.labels);
        ids.push_back(s.entry.id);
      }
      const auto ev = eval::evaluate_corpus(preds, refs, cfg.segmenter.window_k);
      for (size_t i = 0; i < ids.size(); ++i) {
        const auto& r = ev.per_show[i];
        report.results.rows.push_back({ids[i], tag, r.precision, r.recall, r.f1});
      }
      report.results.rows.push_back({std::string(kMacroRow), tag, ev.precision, ev.recall, ev.f1});

      MethodSummary m;
      m.method = tag;
      m.precision = ev.precision;
      m.recall = ev.recall;
      m.f1 = ev.f1;
      m.units = model.units();
      m.lr = model.lr;
      m.tau = model.tau;
      m.val_f1 = model.val_f1;
      m.best_epoch = model.best_epoch;
      report.methods.push_back(m);
      char buf[160];
      std::snprintf(buf, sizeof buf, "segmenter %s: test P %.3f R %.3f F1 %.3f", tag.c_str(),
                    ev.precision, ev.recall, ev.f1);
      say(log, buf);
    });
  }
  fill_improvements(report);

  if (methods.size() >= 2) {
    run_stage("stats", [&] {
      try {
        report.stats = run_stats(report.results, cfg.stats.baseline, cfg.stats.alphas);
      } catch (const DataError& e) {
        // Identical per-show scores for every method leave nothing to rank.
        report.stats_note = e.what();
      }
    });
  }
  run_stage("results", [&] { report.results.validate(); });
  return report;
}

}  // namespace audioseg::pipeline
