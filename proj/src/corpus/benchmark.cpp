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

#include "audioseg/corpus/benchmark.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "audioseg/dsp/wav.hpp"
#include "audioseg/error.hpp"
#include "audioseg/random.hpp"
#include "json.hpp"

namespace audioseg::corpus {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kVocabStream = 0x766f636162ULL;
constexpr uint64_t kShowStream = 0x73686f77ULL;
constexpr uint64_t kVectorStream = 0x76656374ULL;
constexpr const char* kWordVectorFile = "word_vectors.tsv";

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void CorpusConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw UsageError("corpus." + key + ": " + why);
  };
  if (n_shows < 1) fail("shows", "must be at least 1");
  if (n_topics < 2) fail("topics", "must be at least 2");
  if (!(show_seconds > 0)) fail("show_seconds", "must be positive");
  if (!(fragment_min_s > 0) || fragment_max_s < fragment_min_s)
    fail("fragment_min_s", "need 0 < fragment_min_s <= fragment_max_s");
  if (!(word_min_s > 0) || word_max_s < word_min_s || word_max_s > 1.0)
    fail("word_min_s", "need 0 < word_min_s <= word_max_s <= 1");
  if (words_per_topic < 1) fail("words_per_topic", "must be at least 1");
  if (shared_words < 0) fail("shared_words", "must be non-negative");
  if (!(shared_fraction >= 0 && shared_fraction < 1)) fail("shared_fraction", "must be in [0, 1)");
  if (shared_words == 0 && shared_fraction > 0) fail("shared_fraction", "needs shared_words > 0");
  if (topic_families < 1 || topic_families > n_topics)
    fail("topic_families", "must be between 1 and topics");
  if (!(topic_coherence >= 0 && topic_coherence <= 1)) fail("topic_coherence", "must be in [0, 1]");
  if (!(train_fraction > 0) || !(val_fraction >= 0) || train_fraction + val_fraction > 1)
    fail("train_fraction", "need train > 0, val >= 0, train + val <= 1");
}

std::string CorpusConfig::to_json() const {
  json j;
  j["shows"] = n_shows;
  j["topics"] = n_topics;
  j["show_seconds"] = show_seconds;
  j["fragment_min_s"] = fragment_min_s;
  j["fragment_max_s"] = fragment_max_s;
  j["word_min_s"] = word_min_s;
  j["word_max_s"] = word_max_s;
  j["words_per_topic"] = words_per_topic;
  j["shared_words"] = shared_words;
  j["shared_fraction"] = shared_fraction;
  j["topic_families"] = topic_families;
  j["topic_coherence"] = topic_coherence;
  j["audio_informative"] = audio_informative;
  j["train_fraction"] = train_fraction;
  j["val_fraction"] = val_fraction;
  j["seed"] = seed;
  return j.dump();
}

std::string CorpusConfig::hash() const { return hex64(fnv1a64(to_json())); }

Vocabulary make_vocabulary(const CorpusConfig& cfg) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                  "r", "s", "t", "v", "z", "br", "st", "tr", "kl"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ee"};
  Rng rng(mix_seed(cfg.seed, kVocabStream));
  std::set<std::string> used;
  auto fresh = [&] {
    for (;;) {
      std::string w;
      const int syllables = 2 + int(rng.below(2));
      for (int s = 0; s < syllables; ++s) {
        w += kOnsets[rng.below(std::size(kOnsets))];
        w += kVowels[rng.below(std::size(kVowels))];
      }
      if (used.insert(w).second) return w;
    }
  };
  Vocabulary v;
  v.topical.resize(size_t(cfg.n_topics));
  for (auto& topic : v.topical)
    for (int i = 0; i < cfg.words_per_topic; ++i) topic.push_back(fresh());
  for (int i = 0; i < cfg.shared_words; ++i) v.shared.push_back(fresh());
  return v;
}

namespace {

std::array<double, kWordVectorDim> unit_direction(uint64_t seed) {
  Rng rng(seed);
  std::array<double, kWordVectorDim> v;
  double n2 = 0.0;
  for (double& x : v) {
    x = 2.0 * rng.uniform() - 1.0;
    n2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return v;
}

void append_vector(std::string& out, const std::string& word,
                   const std::array<double, kWordVectorDim>& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2);
  out += word;
  char buf[32];
  for (size_t i = 0; i < kWordVectorDim; ++i) {
    out += i == 0 ? '\t' : ' ';
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v[i] * inv));
    out.append(buf, end);
  }
  out += '\n';
}

}  // namespace

std::string word_vector_table(const CorpusConfig& cfg, const Vocabulary& vocab) {
  const uint64_t base = mix_seed(cfg.seed, kVectorStream);
  std::string out;
  for (size_t t = 0; t < vocab.topical.size(); ++t) {
    const auto family =
        unit_direction(mix_seed(base, t % size_t(std::max(cfg.topic_families, 1))));
    for (const auto& w : vocab.topical[t]) {
      auto v = unit_direction(mix_seed(base, fnv1a64(w)));
      for (size_t i = 0; i < kWordVectorDim; ++i) {
        v[i] = cfg.topic_coherence * family[i] + (1.0 - cfg.topic_coherence) * v[i];
      }
      append_vector(out, w, v);
    }
  }
  for (const auto& w : vocab.shared) append_vector(out, w, unit_direction(mix_seed(base, fnv1a64(w))));
  return out;
}

TopicSpec topic_spec(const CorpusConfig& cfg, const Vocabulary& vocab, int topic,
                     double duration_s) {
  TopicSpec spec;
  spec.topic_id = topic;
  spec.tone = topic_tone(topic, cfg.n_topics);
  spec.boundary_cue = cfg.audio_informative;
  spec.duration_s = duration_s;
  spec.word_min_s = cfg.word_min_s;
  spec.word_max_s = cfg.word_max_s;
  const auto& own = vocab.topical.at(size_t(topic));
  for (const auto& w : own) {
    spec.words.push_back(w);
    spec.weights.push_back((1.0 - cfg.shared_fraction) / double(own.size()));
  }
  if (cfg.shared_fraction > 0) {
    for (const auto& w : vocab.shared) {
      spec.words.push_back(w);
      spec.weights.push_back(cfg.shared_fraction / double(vocab.shared.size()));
    }
  }
  return spec;
}

Show synth_show(const CorpusConfig& cfg, const Vocabulary& vocab, int show_index) {
  const uint64_t show_seed = mix_seed(mix_seed(cfg.seed, kShowStream), uint64_t(show_index));
  Rng rng(show_seed);
  std::vector<Fragment> fragments;
  double total = 0.0;
  int prev = -1;
  while (total < cfg.show_seconds || fragments.size() < 2) {
    int topic = int(rng.below(uint64_t(cfg.n_topics - (prev >= 0 ? 1 : 0))));
    if (prev >= 0 && topic >= prev) ++topic;
    const double duration = rng.uniform(cfg.fragment_min_s, cfg.fragment_max_s);
    auto spec = topic_spec(cfg, vocab, topic, duration);
    fragments.push_back(synth_fragment(spec, mix_seed(show_seed, fragments.size())));
    total += fragments.back().duration();
    prev = topic;
  }
  return build_show(fragments, cfg.show_seconds);
}

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + s + "'");
}

std::vector<ManifestEntry> CorpusManifest::select(Split s) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : shows)
    if (e.split == s) out.push_back(e);
  return out;
}

void write_show(const Show& show, const std::string& id, uint64_t seed,
                const std::string& config_hash, const fs::path& dir) {
  fs::create_directories(dir);
  dsp::write_wav(dir / "show.wav", show.audio, dsp::WavEncoding::kPcm16);
  std::string lines;
  for (size_t i = 0; i < show.tokens.size(); ++i) {
    const auto& t = show.tokens[i];
    json j;
    j["word"] = t.word;
    j["t0"] = t.t0();
    j["t1"] = t.t1();
    j["label"] = int(show.labels[i]);
    j["start"] = t.start;
    j["end"] = t.end;
    j["topic"] = t.topic_id;
    j["cue"] = t.cue;
    lines += j.dump() + "\n";
  }
  write_text(dir / "tokens.jsonl", lines);
  json meta;
  meta["show_id"] = id;
  meta["seed"] = seed;
  meta["config_hash"] = config_hash;
  meta["sample_rate"] = dsp::kTargetRate;
  json topics = json::array(), spans = json::array();
  for (const auto& f : show.fragments) {
    topics.push_back(f.topic_id);
    spans.push_back({{"topic", f.topic_id},
                     {"first_token", f.first_token},
                     {"token_count", f.token_count},
                     {"start", f.start_sample},
                     {"end", f.end_sample}});
  }
  meta["topics"] = topics;
  meta["fragments"] = spans;
  write_text(dir / "meta.json", meta.dump(2) + "\n");
}

Show load_show(const fs::path& dir) {
  Show show;
  std::ifstream in(dir / "tokens.jsonl");
  if (!in) throw DataError("cannot open " + (dir / "tokens.jsonl").string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      WordToken t;
      t.word = j.at("word").get<std::string>();
      if (j.contains("start")) {
        t.start = j.at("start").get<size_t>();
        t.end = j.at("end").get<size_t>();
      } else {
        t.start = size_t(std::llround(j.at("t0").get<double>() * dsp::kTargetRate));
        t.end = size_t(std::llround(j.at("t1").get<double>() * dsp::kTargetRate));
      }
      t.topic_id = j.value("topic", 0);
      t.cue = j.value("cue", false);
      const int label = j.at("label").get<int>();
      if (label != 0 && label != 1) throw DataError("label must be 0 or 1");
      if (t.end <= t.start) throw DataError("token has t1 <= t0");
      show.tokens.push_back(std::move(t));
      show.labels.push_back(uint8_t(label));
    } catch (const json::exception& e) {
      throw DataError((dir / "tokens.jsonl").string() + ":" + std::to_string(lineno) + ": " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError((dir / "tokens.jsonl").string() + ":" + std::to_string(lineno) + ": " +
                      e.what());
    }
  }
  if (show.tokens.empty()) throw DataError(dir.string() + ": show has no tokens");
  if (fs::exists(dir / "meta.json")) {
    const json meta = read_json(dir / "meta.json");
    for (const auto& f : meta.value("fragments", json::array())) {
      show.fragments.push_back({f.at("topic").get<int>(), f.at("first_token").get<size_t>(),
                                f.at("token_count").get<size_t>(), f.at("start").get<size_t>(),
                                f.at("end").get<size_t>()});
    }
  }
  show.audio = dsp::load_wav(dir / "show.wav");
  if (show.audio.sample_rate != dsp::kTargetRate) {
    throw DataError(dir.string() + ": show audio must be 44.1 kHz");
  }
  if (show.tokens.back().end > show.audio.samples.size()) {
    throw DataError(dir.string() + ": tokens extend past the end of show.wav");
  }
  return show;
}

CorpusManifest make_benchmark(const CorpusConfig& cfg, const fs::path& out) {
  cfg.validate();
  fs::create_directories(out);
  const auto vocab = make_vocabulary(cfg);
  const std::string hash = cfg.hash();
  const int n_train = std::max(1, int(std::lround(cfg.train_fraction * cfg.n_shows)));
  const int n_val = std::min(cfg.n_shows - n_train, int(std::lround(cfg.val_fraction * cfg.n_shows)));

  CorpusManifest manifest;
  manifest.root = out;
  manifest.seed = cfg.seed;
  manifest.config_hash = hash;
  manifest.config_json = cfg.to_json();
  manifest.audio_informative = cfg.audio_informative;
  json shows = json::array();
  for (int s = 0; s < cfg.n_shows; ++s) {
    char id[32];
    std::snprintf(id, sizeof id, "show_%03d", s);
    const Split split = s < n_train ? Split::kTrain
                        : s < n_train + n_val ? Split::kVal
                                              : Split::kTest;
    write_show(synth_show(cfg, vocab, s), id, cfg.seed, hash, out / id);
    manifest.shows.push_back({id, out / id, split});
    shows.push_back({{"id", id}, {"path", id}, {"split", split_name(split)}});
  }
  write_text(out / kWordVectorFile, word_vector_table(cfg, vocab));
  manifest.word_vectors = out / kWordVectorFile;
  json m;
  m["format"] = "audioseg-corpus";
  m["version"] = 1;
  m["seed"] = cfg.seed;
  m["config_hash"] = hash;
  m["config"] = json::parse(cfg.to_json());
  m["word_vectors"] = kWordVectorFile;
  m["shows"] = shows;
  write_text(out / "manifest.json", m.dump(2) + "\n");
  return manifest;
}

CorpusManifest load_manifest(const fs::path& root) {
  const json m = read_json(root / "manifest.json");
  CorpusManifest manifest;
  manifest.root = root;
  try {
    if (m.at("format").get<std::string>() != "audioseg-corpus") {
      throw DataError("not an audioseg corpus manifest");
    }
    manifest.seed = m.at("seed").get<uint64_t>();
    manifest.config_hash = m.at("config_hash").get<std::string>();
    manifest.config_json = m.at("config").dump();
    manifest.audio_informative = m.at("config").value("audio_informative", false);
    if (m.contains("word_vectors")) {
      manifest.word_vectors = root / m.at("word_vectors").get<std::string>();
    }
    for (const auto& s : m.at("shows")) {
      manifest.shows.push_back({s.at("id").get<std::string>(),
                                root / s.at("path").get<std::string>(),
                                parse_split(s.at("split").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw DataError((root / "manifest.json").string() + ": " + e.what());
  }
  if (manifest.shows.empty()) throw DataError("manifest lists no shows");
  return manifest;
}

}  // namespace audioseg::corpus
