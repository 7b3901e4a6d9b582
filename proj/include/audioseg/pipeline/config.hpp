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
// Run configuration for a full experiment: one JSON document with nested
// sections. Parsing is strict: wrong types, out-of-range values and unknown
// keys are all reported, each with its key path.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "audioseg/corpus/benchmark.hpp"
#include "audioseg/error.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/segmenter/segmenter.hpp"

namespace audioseg::pipeline {

struct ConfigIssue {
  std::string path;  // e.g. "segmenter.units[1]"
  std::string message;
};

class ConfigError : public UsageError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct GeneratorTraining {
  int epochs = 10;
  size_t batch_size = 32;
  double lr = 1e-3;
  double val_fraction = 0.1;
};

// A generator is either loaded from `checkpoint` or trained from the
// recipe fields of its task.
struct SecRecipe {
  std::filesystem::path checkpoint;
  std::string checkpoint_id;  // content hash of the checkpoint metadata
  int classes = 8;
  int clips_per_class = 20;
  double clip_seconds = 2.0;
  GeneratorTraining train;
};

struct FpcRecipe {
  std::filesystem::path checkpoint;
  std::string checkpoint_id;
  int fragments = 16;
  double fragment_seconds = 125.0;
  int jingles = 16;
  double jingle_seconds = 4.0;
  size_t per_class_cap = 0;
  GeneratorTraining train;
};

struct WcRecipe {
  std::filesystem::path checkpoint;
  std::string checkpoint_id;
  int words = 48;  // taken round-robin from the corpus topic vocabularies
  int clips_per_word = 6;
  GeneratorTraining train;
};

struct StatsConfig {
  std::string baseline = "TXT";
  std::vector<double> alphas{0.02, 0.01};
};

struct RunConfig {
  uint64_t seed = 1;
  size_t threads = 1;
  std::filesystem::path output = "results";
  std::filesystem::path cache = "cache";

  // An existing corpus directory, whose manifest then supplies `corpus`.
  // When empty the corpus is synthesized from `corpus`, whose seed
  // defaults to the run seed.
  std::filesystem::path corpus_path;
  corpus::CorpusConfig corpus;

  // "corpus" (the corpus word-vector table), "hash", or a table path.
  std::string text_embeddings = "corpus";
  std::filesystem::path text_table;  // resolved table path, empty in hash mode
  std::string text_table_id;         // content hash of that table

  SecRecipe sec;
  FpcRecipe fpc;
  WcRecipe wc;
  segmenter::SegTrainConfig segmenter;
  std::vector<std::string> methods{"TXT", "SEC", "FPC", "TXT+SEC", "TXT+FPC", "TXT+WC", "ALL"};
  StatsConfig stats;

  std::vector<segmenter::FeatureConfig> feature_configs() const;
  bool needs_text() const;
  std::vector<generator::TaskTag> needed_generators() const;  // SEC, FPC, WC order

  // Canonical JSON of one generator's recipe (or checkpoint identity).
  std::string generator_json(generator::TaskTag task) const;

  // Canonical JSON of everything that affects results. Output and cache
  // locations and the thread count are left out.
  std::string to_json() const;
  std::string hash() const;  // 16 hex digits
};

// Parses `text`; relative paths resolve against `base_dir`. Throws
// ConfigError listing every violation.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
// Reads and parses a config file. Throws DataError if it cannot be read.
RunConfig load_run_config(const std::filesystem::path& file);

}  // namespace audioseg::pipeline
