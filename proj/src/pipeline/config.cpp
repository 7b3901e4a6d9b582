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

#include "audioseg/pipeline/config.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audioseg/random.hpp"

namespace audioseg::pipeline {
namespace fs = std::filesystem;
using json = nlohmann::json;
using generator::TaskTag;
using segmenter::FeatureConfig;

namespace {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid run config:";
  for (const auto& i : issues) out += "\n  " + i.path + ": " + i.message;
  return out;
}

std::string child(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string type_name(const json& j) {
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  return j.type_name();
}

// Reads the keys of one JSON object, recording every problem instead of
// stopping at the first. finish() reports keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<ConfigIssue>& issues)
      : j_(j), path_(std::move(path)), issues_(issues) {
    if (!j_.is_object()) {
      fail(path_, "expected an object, got " + type_name(j_));
      ok_ = false;
    }
  }

  Section(json&&, std::string, std::vector<ConfigIssue>&) = delete;

  bool ok() const { return ok_; }
  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const { return child(path_, key); }
  void fail(const std::string& path, const std::string& message) {
    issues_.push_back({path.empty() ? "<root>" : path, message});
  }

  const json* get(const std::string& key) {
    if (!ok_) return nullptr;
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  bool has(const std::string& key) const { return ok_ && j_.contains(key); }

  template <typename Int>
  void integer(const std::string& key, Int& out, long long lo, long long hi = LLONG_MAX) {
    if (const json* v = get(key)) read_integer(*v, key_path(key), out, lo, hi);
  }

  template <typename Int>
  bool read_integer(const json& v, const std::string& path, Int& out, long long lo,
                    long long hi) {
    if (!v.is_number_integer()) {
      fail(path, "expected an integer, got " + type_name(v));
      return false;
    }
    if (v.is_number_unsigned()) {
      const auto u = v.get<unsigned long long>();
      if (hi != LLONG_MAX && u > static_cast<unsigned long long>(hi)) {
        fail(path, "must be at most " + std::to_string(hi));
        return false;
      }
      if (lo > 0 && u < static_cast<unsigned long long>(lo)) {
        fail(path, "must be at least " + std::to_string(lo));
        return false;
      }
      out = static_cast<Int>(u);
      return true;
    }
    const auto s = v.get<long long>();
    if (s < lo) {
      fail(path, lo == 0 ? "must be a non-negative integer"
                         : "must be at least " + std::to_string(lo));
      return false;
    }
    if (s > hi) {
      fail(path, "must be at most " + std::to_string(hi));
      return false;
    }
    out = static_cast<Int>(s);
    return true;
  }

  void number(const std::string& key, double& out, const std::function<bool(double)>& valid,
              const std::string& rule) {
    if (const json* v = get(key)) read_number(*v, key_path(key), out, valid, rule);
  }

  bool read_number(const json& v, const std::string& path, double& out,
                   const std::function<bool(double)>& valid, const std::string& rule) {
    if (!v.is_number()) {
      fail(path, "expected a number, got " + type_name(v));
      return false;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x) || !valid(x)) {
      fail(path, rule);
      return false;
    }
    out = x;
    return true;
  }

  void boolean(const std::string& key, bool& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_boolean()) return fail(key_path(key), "expected true or false, got " + type_name(*v));
    out = v->get<bool>();
  }

  bool string(const std::string& key, std::string& out) {
    const json* v = get(key);
    if (!v) return false;
    if (!v->is_string()) {
      fail(key_path(key), "expected a string, got " + type_name(*v));
      return false;
    }
    out = v->get<std::string>();
    if (out.empty()) {
      fail(key_path(key), "must not be empty");
      return false;
    }
    return true;
  }

  // A scalar or a non-empty array of scalars.
  template <typename T, typename ReadOne>
  void list(const std::string& key, std::vector<T>& out, ReadOne read_one) {
    const json* v = get(key);
    if (!v) return;
    const std::string path = key_path(key);
    std::vector<T> values;
    bool good = true;
    if (v->is_array()) {
      if (v->empty()) {
        fail(path, "must not be empty");
        return;
      }
      for (size_t i = 0; i < v->size(); ++i) {
        T x{};
        good = read_one((*v)[i], path + "[" + std::to_string(i) + "]", x) && good;
        values.push_back(x);
      }
    } else {
      T x{};
      good = read_one(*v, path, x);
      values.push_back(x);
    }
    if (good) out = std::move(values);
  }

  void finish() {
    if (!ok_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(key_path(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<ConfigIssue>& issues_;
  std::set<std::string> seen_;
  bool ok_ = true;
};

auto positive = [](double x) { return x > 0; };
auto non_negative = [](double x) { return x >= 0; };
auto open_unit = [](double x) { return x > 0 && x < 1; };

void read_corpus_fields(Section& s, corpus::CorpusConfig& c) {
  s.integer("shows", c.n_shows, 1, 100000);
  s.integer("topics", c.n_topics, 2, 100000);
  s.number("show_seconds", c.show_seconds, positive, "must be positive");
  s.number("fragment_min_s", c.fragment_min_s, positive, "must be positive");
  s.number("fragment_max_s", c.fragment_max_s, positive, "must be positive");
  s.number("word_min_s", c.word_min_s, positive, "must be positive");
  s.number("word_max_s", c.word_max_s, [](double x) { return x > 0 && x <= 1; },
           "must be in (0, 1]");
  s.integer("words_per_topic", c.words_per_topic, 1, 1000000);
  s.integer("shared_words", c.shared_words, 0, 1000000);
  s.number("shared_fraction", c.shared_fraction, [](double x) { return x >= 0 && x < 1; },
           "must be in [0, 1)");
  s.integer("topic_families", c.topic_families, 1, 100000);
  s.number("topic_coherence", c.topic_coherence, [](double x) { return x >= 0 && x <= 1; },
           "must be in [0, 1]");
  s.boolean("audio_informative", c.audio_informative);
  s.number("train_fraction", c.train_fraction, open_unit, "must be in (0, 1)");
  s.number("val_fraction", c.val_fraction, [](double x) { return x >= 0 && x < 1; },
           "must be in [0, 1)");
  s.integer("seed", c.seed, 0);
}

// The module's own cross-field checks, mapped onto this config's key paths.
void check_corpus(const corpus::CorpusConfig& c, const std::string& path,
                  std::vector<ConfigIssue>& issues) {
  try {
    c.validate();
  } catch (const UsageError& e) {
    std::string what = e.what();
    const std::string prefix = "corpus.";
    if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
    const auto colon = what.find(": ");
    if (colon == std::string::npos) {
      issues.push_back({path, what});
    } else {
      issues.push_back({child(path, what.substr(0, colon)), what.substr(colon + 2)});
    }
  }
}

std::string file_id(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void read_training(Section& s, GeneratorTraining& t) {
  s.integer("epochs", t.epochs, 1, 1000000);
  s.integer("batch", t.batch_size, 1, 1000000);
  s.number("lr", t.lr, positive, "must be positive");
  s.number("val_fraction", t.val_fraction, open_unit, "must be in (0, 1)");
}

template <typename Recipe>
void read_checkpoint(Section& s, Recipe& r, const fs::path& base) {
  std::string p;
  if (!s.string("checkpoint", p)) return;
  r.checkpoint = resolve(base, p);
  const fs::path meta = r.checkpoint / "meta.json";
  if (!fs::is_regular_file(meta)) {
    s.fail(s.key_path("checkpoint"), "no generator checkpoint at " + r.checkpoint.string());
    return;
  }
  r.checkpoint_id = file_id(meta);
}

json training_json(const GeneratorTraining& t) {
  return {{"epochs", t.epochs}, {"batch", t.batch_size}, {"lr", t.lr},
          {"val_fraction", t.val_fraction}};
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : UsageError(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<FeatureConfig> RunConfig::feature_configs() const {
  std::vector<FeatureConfig> out;
  for (const auto& m : methods) out.push_back(FeatureConfig::parse(m));
  return out;
}

bool RunConfig::needs_text() const {
  for (const auto& f : feature_configs()) {
    if (f.text) return true;
  }
  return false;
}

std::vector<TaskTag> RunConfig::needed_generators() const {
  bool want[3] = {false, false, false};
  for (const auto& f : feature_configs()) {
    want[0] = want[0] || f.sec;
    want[1] = want[1] || f.fpc;
    want[2] = want[2] || f.wc;
  }
  std::vector<TaskTag> out;
  if (want[0]) out.push_back(TaskTag::kSec);
  if (want[1]) out.push_back(TaskTag::kFpc);
  if (want[2]) out.push_back(TaskTag::kWc);
  return out;
}

std::string RunConfig::generator_json(TaskTag task) const {
  json j;
  switch (task) {
    case TaskTag::kSec:
      if (!sec.checkpoint_id.empty()) {
        j = {{"checkpoint", sec.checkpoint_id}};
      } else {
        j = {{"classes", sec.classes}, {"clips_per_class", sec.clips_per_class},
             {"clip_seconds", sec.clip_seconds}, {"train", training_json(sec.train)}};
      }
      break;
    case TaskTag::kFpc:
      if (!fpc.checkpoint_id.empty()) {
        j = {{"checkpoint", fpc.checkpoint_id}};
      } else {
        j = {{"fragments", fpc.fragments}, {"fragment_seconds", fpc.fragment_seconds},
             {"jingles", fpc.jingles}, {"jingle_seconds", fpc.jingle_seconds},
             {"per_class_cap", fpc.per_class_cap}, {"train", training_json(fpc.train)}};
      }
      break;
    case TaskTag::kWc:
      if (!wc.checkpoint_id.empty()) {
        j = {{"checkpoint", wc.checkpoint_id}};
      } else {
        j = {{"words", wc.words}, {"clips_per_word", wc.clips_per_word},
             {"train", training_json(wc.train)}};
      }
      break;
    case TaskTag::kCustom:
      throw UsageError("generator_json: custom generators have no recipe");
  }
  j["task"] = generator::task_name(task);
  return j.dump();
}

std::string RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["corpus"] = json::parse(corpus.to_json());
  j["text"] = needs_text() ? json(text_table_id.empty() ? text_embeddings : text_table_id)
                           : json(nullptr);
  json gens = json::object();
  for (TaskTag t : needed_generators()) gens[generator::task_name(t)] = json::parse(generator_json(t));
  j["generators"] = gens;
  j["segmenter"] = json::parse(segmenter.to_json());
  j["methods"] = methods;
  j["stats"] = {{"baseline", stats.baseline}, {"alpha", stats.alphas}};
  return j.dump();
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json())); }

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"<root>", std::string("not valid JSON: ") + e.what()}});
  }

  std::vector<ConfigIssue> issues;
  RunConfig cfg;
  Section top(root, "", issues);
  if (!top.ok()) throw ConfigError(issues);

  top.integer("seed", cfg.seed, 0);
  top.integer("threads", cfg.threads, 1, 1024);
  std::string path;
  if (top.string("output", path)) cfg.output = resolve(base_dir, path);
  else cfg.output = resolve(base_dir, cfg.output.string());
  if (top.string("cache", path)) cfg.cache = resolve(base_dir, path);
  else cfg.cache = resolve(base_dir, cfg.cache.string());

  // corpus: a directory path, or a section with either "path" or the
  // synthesis parameters.
  bool corpus_seed_given = false;
  if (const json* c = top.get("corpus")) {
    if (c->is_string()) {
      cfg.corpus_path = resolve(base_dir, c->get<std::string>());
    } else {
      Section s(*c, "corpus", issues);
      if (s.ok()) {
        if (s.has("path")) {
          if (s.string("path", path)) cfg.corpus_path = resolve(base_dir, path);
          for (const auto& [key, value] : c->items()) {
            if (key != "path") s.fail(s.key_path(key), "not allowed together with corpus.path");
            s.get(key);
          }
        } else {
          corpus_seed_given = s.has("seed");
          read_corpus_fields(s, cfg.corpus);
        }
        s.finish();
      }
    }
  }
  if (!cfg.corpus_path.empty()) {
    try {
      const auto manifest = corpus::load_manifest(cfg.corpus_path);
      const json stored = json::parse(manifest.config_json);
      Section s(stored, "corpus.path", issues);
      read_corpus_fields(s, cfg.corpus);
      s.finish();
    } catch (const Error& e) {
      issues.push_back({"corpus.path", e.what()});
    }
  } else {
    if (!corpus_seed_given) cfg.corpus.seed = cfg.seed;
    check_corpus(cfg.corpus, "corpus", issues);
  }

  if (const json* t = top.get("text")) {
    Section s(*t, "text", issues);
    s.string("embeddings", cfg.text_embeddings);
    s.finish();
  }

  if (const json* g = top.get("generators")) {
    Section gens(*g, "generators", issues);
    if (const json* v = gens.get("sec")) {
      Section s(*v, "generators.sec", issues);
      read_checkpoint(s, cfg.sec, base_dir);
      s.integer("classes", cfg.sec.classes, 2, 1000);
      s.integer("clips_per_class", cfg.sec.clips_per_class, 2, 100000);
      s.number("clip_seconds", cfg.sec.clip_seconds, positive, "must be positive");
      read_training(s, cfg.sec.train);
      s.finish();
    }
    if (const json* v = gens.get("fpc")) {
      Section s(*v, "generators.fpc", issues);
      read_checkpoint(s, cfg.fpc, base_dir);
      s.integer("fragments", cfg.fpc.fragments, 1, 100000);
      s.number("fragment_seconds", cfg.fpc.fragment_seconds,
               [](double x) { return x >= generator::kFpcMinFragmentSeconds; },
               "must be at least 120");
      s.integer("jingles", cfg.fpc.jingles, 1, 100000);
      s.number("jingle_seconds", cfg.fpc.jingle_seconds, [](double x) { return x >= 1; },
               "must be at least 1");
      s.integer("per_class_cap", cfg.fpc.per_class_cap, 0);
      read_training(s, cfg.fpc.train);
      s.finish();
    }
    if (const json* v = gens.get("wc")) {
      Section s(*v, "generators.wc", issues);
      read_checkpoint(s, cfg.wc, base_dir);
      s.integer("words", cfg.wc.words, 2, 100000);
      s.integer("clips_per_word", cfg.wc.clips_per_word, 2, 100000);
      read_training(s, cfg.wc.train);
      s.finish();
    }
    gens.finish();
  }

  if (const json* v = top.get("segmenter")) {
    Section s(*v, "segmenter", issues);
    s.list("units", cfg.segmenter.units, [&](const json& x, const std::string& p, size_t& out) {
      return s.read_integer(x, p, out, 1, 4096);
    });
    s.list("lr", cfg.segmenter.learning_rates,
           [&](const json& x, const std::string& p, double& out) {
             return s.read_number(x, p, out, positive, "must be positive");
           });
    s.list("tau", cfg.segmenter.thresholds, [&](const json& x, const std::string& p, double& out) {
      return s.read_number(x, p, out, open_unit, "must be in (0, 1)");
    });
    s.integer("epochs", cfg.segmenter.epochs, 1, 1000000);
    s.integer("bptt", cfg.segmenter.bptt_window, 1);
    s.integer("k", cfg.segmenter.window_k, 1);
    s.finish();
  }
  cfg.segmenter.seed = cfg.seed;
  cfg.segmenter.threads = cfg.threads;

  if (const json* v = top.get("methods")) {
    if (!v->is_array() || v->empty()) {
      issues.push_back({"methods", "expected a non-empty array of method tags"});
    } else {
      std::vector<std::string> methods;
      std::set<std::string> seen;
      for (size_t i = 0; i < v->size(); ++i) {
        const std::string p = "methods[" + std::to_string(i) + "]";
        const json& m = (*v)[i];
        if (!m.is_string()) {
          issues.push_back({p, "expected a string, got " + type_name(m)});
          continue;
        }
        try {
          const std::string tag = FeatureConfig::parse(m.get<std::string>()).tag();
          if (!seen.insert(tag).second) issues.push_back({p, "duplicate method " + tag});
          methods.push_back(tag);
        } catch (const UsageError& e) {
          issues.push_back({p, e.what()});
        }
      }
      cfg.methods = methods;
    }
  }

  if (const json* v = top.get("stats")) {
    Section s(*v, "stats", issues);
    if (s.string("baseline", cfg.stats.baseline)) {
      try {
        cfg.stats.baseline = FeatureConfig::parse(cfg.stats.baseline).tag();
      } catch (const UsageError& e) {
        issues.push_back({"stats.baseline", e.what()});
      }
    }
    s.list("alpha", cfg.stats.alphas, [&](const json& x, const std::string& p, double& out) {
      return s.read_number(x, p, out, open_unit, "must be in (0, 1)");
    });
    // Loosest level first, so the star count reads as "significant at the
    // first n levels".
    auto& a = cfg.stats.alphas;
    std::sort(a.begin(), a.end(), std::greater<>());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    s.finish();
  }
  top.finish();

  // Cross-field checks, only meaningful once the parts parsed.
  if (issues.empty()) {
    if (cfg.methods.size() >= 2 &&
        std::find(cfg.methods.begin(), cfg.methods.end(), cfg.stats.baseline) ==
            cfg.methods.end()) {
      issues.push_back({"stats.baseline", cfg.stats.baseline + " is not one of the methods"});
    }
    if (cfg.needs_text()) {
      if (cfg.text_embeddings == "corpus") {
        if (!cfg.corpus_path.empty()) {
          const auto manifest = corpus::load_manifest(cfg.corpus_path);
          if (manifest.word_vectors.empty() || !fs::is_regular_file(manifest.word_vectors)) {
            issues.push_back({"text.embeddings", "the corpus ships no word-vector table"});
          } else {
            cfg.text_table = manifest.word_vectors;
          }
        }
      } else if (cfg.text_embeddings != "hash") {
        cfg.text_table = resolve(base_dir, cfg.text_embeddings);
        if (!fs::is_regular_file(cfg.text_table)) {
          issues.push_back({"text.embeddings", "no such file: " + cfg.text_table.string()});
        }
      }
      if (!cfg.text_table.empty() && issues.empty()) cfg.text_table_id = file_id(cfg.text_table);
    }
    if (!cfg.corpus_path.empty() && issues.empty()) {
      const auto manifest = corpus::load_manifest(cfg.corpus_path);
      if (manifest.select(corpus::Split::kVal).empty() ||
          manifest.select(corpus::Split::kTest).empty() ||
          manifest.select(corpus::Split::kTrain).empty()) {
        issues.push_back({"corpus.path", "the corpus needs train, val and test shows"});
      }
    } else if (cfg.corpus_path.empty()) {
      const int n = cfg.corpus.n_shows;
      const int n_train = std::max(1, int(std::lround(cfg.corpus.train_fraction * n)));
      const int n_val = std::min(n - n_train, int(std::lround(cfg.corpus.val_fraction * n)));
      if (n_train < 1 || n_val < 1 || cfg.corpus.n_shows - n_train - n_val < 1) {
        issues.push_back({"corpus.shows", "too few shows for non-empty train, val and test splits"});
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

RunConfig load_run_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), file.parent_path());
}

}  // namespace audioseg::pipeline
