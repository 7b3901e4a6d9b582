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

// Choi-style benchmark corpora on disk.
//
//   <root>/manifest.json              shows, split assignment, config, seed
//   <root>/<show_id>/show.wav         44.1 kHz mono PCM16
//   <root>/<show_id>/tokens.jsonl     {word, t0, t1, label, start, end, topic, cue}
//   <root>/<show_id>/meta.json        topic sequence, fragment spans, seed

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "audioseg/corpus/synth.hpp"

namespace audioseg::corpus {

struct CorpusConfig {
  int n_shows = 20;
  int n_topics = 8;
  double show_seconds = 120.0;
  double fragment_min_s = 10.0;
  double fragment_max_s = 30.0;
  double word_min_s = 0.25;
  double word_max_s = 0.75;
  int words_per_topic = 30;
  int shared_words = 60;
  double shared_fraction = 0.3;  // probability mass of the shared pool
  // Topics t and t' belong to the same family when t % families equals
  // t' % families. Word vectors of a family cluster around one direction.
  int topic_families = 2;
  double topic_coherence = 0.8;  // weight of the family direction
  bool audio_informative = true;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  uint64_t seed = 1;

  void validate() const;
  std::string to_json() const;  // canonical, sorted keys
  std::string hash() const;     // 16 hex digits
};

struct Vocabulary {
  std::vector<std::vector<std::string>> topical;  // [topic][word]
  std::vector<std::string> shared;
};

// Pronounceable pseudo-words, unique across the whole vocabulary.
Vocabulary make_vocabulary(const CorpusConfig& cfg);

TopicSpec topic_spec(const CorpusConfig& cfg, const Vocabulary& vocab, int topic,
                     double duration_s);

inline constexpr size_t kWordVectorDim = 300;

// Distributional word vectors for the corpus vocabulary, standing in for a
// pretrained embedding table: a topical word is the normalized blend
// coherence * family_direction + (1 - coherence) * own_direction, a shared
// word is its own direction. Directions are seeded unit vectors. Returned
// as text lines "word<TAB>v1 ... v300".
std::string word_vector_table(const CorpusConfig& cfg, const Vocabulary& vocab);

// One show, a pure function of (cfg, show_index).
Show synth_show(const CorpusConfig& cfg, const Vocabulary& vocab, int show_index);

enum class Split { kTrain, kVal, kTest };
std::string split_name(Split s);
Split parse_split(const std::string& s);

struct ManifestEntry {
  std::string id;
  std::filesystem::path dir;
  Split split = Split::kTrain;
};

struct CorpusManifest {
  std::filesystem::path root;
  uint64_t seed = 0;
  std::string config_hash;
  std::string config_json;  // canonical JSON of the generating CorpusConfig
  bool audio_informative = false;
  std::filesystem::path word_vectors;  // empty when the corpus ships none
  std::vector<ManifestEntry> shows;

  std::vector<ManifestEntry> select(Split s) const;
};

// Writes every show, word_vectors.tsv and the manifest. Existing files are
// overwritten.
CorpusManifest make_benchmark(const CorpusConfig& cfg, const std::filesystem::path& out);

CorpusManifest load_manifest(const std::filesystem::path& root);

void write_show(const Show& show, const std::string& id, uint64_t seed,
                const std::string& config_hash, const std::filesystem::path& dir);

// Tokens, labels and fragment spans from the JSON files, audio from show.wav.
Show load_show(const std::filesystem::path& dir);

}  // namespace audioseg::corpus
