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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "audioseg/corpus/benchmark.hpp"
#include "audioseg/corpus/clips.hpp"
#include "audioseg/dsp/mel.hpp"
#include "audioseg/error.hpp"
#include "doctest.h"

using namespace audioseg;
using namespace audioseg::corpus;
namespace fs = std::filesystem;

namespace {

TopicSpec simple_topic(int id, double seconds, double word_s, bool cue = false) {
  TopicSpec t;
  t.topic_id = id;
  t.words = {"alpha", "bravo", "charlie", "delta"};
  t.weights = {1, 1, 1, 1};
  t.tone = topic_tone(id, 8);
  t.duration_s = seconds;
  t.word_min_s = t.word_max_s = word_s;
  t.boundary_cue = cue;
  return t;
}

// Cheap fragment with silent audio and fixed 0.5 s tokens.
Fragment silent_fragment(int topic, double seconds) {
  Fragment f;
  f.topic_id = topic;
  const size_t len = 22050;
  const size_t total = size_t(seconds * 44100);
  for (size_t s = 0; s < total; s += len) f.tokens.push_back({"w", s, s + len, topic, false});
  f.audio.samples.assign(f.tokens.back().end, 0.0f);
  return f;
}

double mean_band_centroid(const dsp::Waveform& w) {
  double total = 0;
  int chunks = 0;
  for (const auto& c : dsp::chunk_clip(w)) {
    const auto p = dsp::mel_power(c);
    double num = 0, den = 0;
    for (size_t b = 0; b < dsp::kMelBands; ++b)
      for (size_t f = 0; f < dsp::kMelFrames; ++f) {
        num += double(b) * p[b * dsp::kMelFrames + f];
        den += p[b * dsp::kMelFrames + f];
      }
    total += num / den;
    ++chunks;
  }
  return total / chunks;
}

// Matched-filter chirp detector: normalized correlation of the token's
// opening half second with the reference sweep.
double chirp_score(const dsp::Waveform& audio, const WordToken& tok) {
  const size_t n = size_t(kChirpSeconds * 44100);
  if (tok.length() < n) return 0.0;
  std::vector<float> ref(n);
  const double slope = (kChirpEndHz - kChirpStartHz) / kChirpSeconds;
  for (size_t i = 0; i < n; ++i) {
    const double t = i / 44100.0;
    ref[i] = float(std::sin(2 * M_PI * (kChirpStartHz * t + 0.5 * slope * t * t)));
  }
  double xy = 0, xx = 0, yy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = audio.samples[tok.start + i], y = ref[i];
    xy += x * y;
    xx += x * x;
    yy += y * y;
  }
  return xx > 0 ? std::abs(xy) / std::sqrt(xx * yy) : 0.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CorpusConfig small_config(bool informative) {
  CorpusConfig c;
  c.n_shows = 3;
  c.n_topics = 3;
  c.show_seconds = 12;
  c.fragment_min_s = 3;
  c.fragment_max_s = 5;
  c.words_per_topic = 5;
  c.shared_words = 4;
  c.audio_informative = informative;
  c.seed = 99;
  return c;
}

}  // namespace

TEST_SUITE("fragments") {
  TEST_CASE("10 s of 0.5 s words is 20 tokens") {
    auto f = synth_fragment(simple_topic(0, 10.0, 0.5), 1);
    CHECK(f.tokens.size() == 20);
    CHECK(f.audio.samples.size() == 20 * 22050);
  }

  TEST_CASE("same topic and seed give bit-identical audio") {
    auto spec = simple_topic(2, 4.0, 0.3);
    spec.word_max_s = 0.7;
    auto a = synth_fragment(spec, 42), b = synth_fragment(spec, 42);
    CHECK(a.audio.samples == b.audio.samples);
    auto c = synth_fragment(spec, 43);
    CHECK(a.audio.samples != c.audio.samples);
  }

  TEST_CASE("token spans tile the fragment in order") {
    auto spec = simple_topic(1, 6.0, 0.25);
    spec.word_max_s = 0.75;
    auto f = synth_fragment(spec, 5);
    size_t cursor = 0;
    for (const auto& t : f.tokens) {
      CHECK(t.start == cursor);
      CHECK(t.end > t.start);
      CHECK(t.length() <= 44100);
      cursor = t.end;
    }
    CHECK(cursor == f.audio.samples.size());
  }

  TEST_CASE("distant topic colors differ in spectral centroid") {
    auto lo = synth_fragment(simple_topic(0, 6.0, 0.5), 3);
    auto hi = synth_fragment(simple_topic(7, 6.0, 0.5), 3);
    const double d = mean_band_centroid(hi.audio) - mean_band_centroid(lo.audio);
    MESSAGE("centroid difference " << d << " bands");
    CHECK(d > 2.0);
  }

  TEST_CASE("cue fragments open with the chirp") {
    auto f = synth_fragment(simple_topic(0, 3.0, 0.4, true), 9);
    CHECK(f.tokens[0].cue);
    CHECK(f.tokens[0].length() == 22050);
    CHECK(chirp_score(f.audio, f.tokens[0]) > 0.99);
    CHECK(chirp_score(f.audio, f.tokens[1]) < 0.3);
  }

  TEST_CASE("empty vocabulary") {
    auto spec = simple_topic(0, 3.0, 0.4);
    spec.words.clear();
    spec.weights.clear();
    CHECK_THROWS_AS(synth_fragment(spec, 1), DataError);
  }
}

TEST_SUITE("shows") {
  TEST_CASE("two 30 s fragments give one boundary at fragment two") {
    auto show = build_show({silent_fragment(0, 30), silent_fragment(1, 30)}, 60);
    CHECK(show.tokens.size() == 120);
    size_t ones = 0;
    for (auto y : show.labels) ones += y;
    CHECK(ones == 1);
    CHECK(show.labels[60] == 1);
    CHECK(show.tokens[60].start == 30 * 44100);
  }

  TEST_CASE("five fragments give four boundaries") {
    std::vector<Fragment> fr;
    for (int i = 0; i < 5; ++i) fr.push_back(silent_fragment(i % 2, 10));
    auto show = build_show(fr, 50);
    size_t ones = 0;
    for (auto y : show.labels) ones += y;
    CHECK(ones == 4);
    CHECK(show.labels[0] == 0);
  }

  TEST_CASE("hour-long target stops after the fragment that crosses it") {
    std::vector<Fragment> fr;
    for (int i = 0; i < 14; ++i) fr.push_back(silent_fragment(i % 3, 280 + 5 * (i % 4)));
    auto show = build_show(fr, 3600);
    CHECK(show.audio.duration() >= 3600.0);
    CHECK(show.audio.duration() < 3600.0 + 295.0);
    CHECK(show.fragments.size() < fr.size());
  }

  TEST_CASE("labels are exactly the fragment changes") {
    CorpusConfig cfg = small_config(true);
    auto vocab = make_vocabulary(cfg);
    auto show = synth_show(cfg, vocab, 1);
    size_t frag = 0;
    for (size_t i = 0; i < show.tokens.size(); ++i) {
      while (frag + 1 < show.fragments.size() && show.fragments[frag + 1].first_token <= i) ++frag;
      const bool change = i > 0 && show.fragments[frag].first_token == i;
      CHECK(bool(show.labels[i]) == change);
    }
    for (size_t f = 1; f < show.fragments.size(); ++f)
      CHECK(show.fragments[f].topic_id != show.fragments[f - 1].topic_id);
  }

  TEST_CASE("token audio re-synthesizes exactly") {
    CorpusConfig cfg = small_config(true);
    auto vocab = make_vocabulary(cfg);
    auto show = synth_show(cfg, vocab, 0);
    for (const auto& t : show.tokens) {
      auto again = synth_token(t, topic_tone(t.topic_id, cfg.n_topics));
      REQUIRE(again.size() == t.length());
      CHECK(std::equal(again.begin(), again.end(), show.audio.samples.begin() + t.start));
    }
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(build_show({silent_fragment(0, 5)}, 10), DataError);
    CHECK_THROWS_AS(build_show({silent_fragment(0, 5), silent_fragment(0, 5)}, 10), DataError);
    CHECK_THROWS_AS(build_show({silent_fragment(0, 1), silent_fragment(1, 1)}, 100), DataError);
  }
}

TEST_SUITE("benchmark") {
  TEST_CASE("writes show directories and a manifest, byte-identical on rerun") {
    const fs::path a = fs::temp_directory_path() / "audioseg_corpus_a";
    const fs::path b = fs::temp_directory_path() / "audioseg_corpus_b";
    fs::remove_all(a);
    fs::remove_all(b);
    auto cfg = small_config(true);
    auto m = make_benchmark(cfg, a);
    make_benchmark(cfg, b);
    CHECK(m.shows.size() == 3);
    auto loaded = load_manifest(a);
    REQUIRE(loaded.shows.size() == 3);
    CHECK(loaded.config_hash == cfg.hash());
    for (const auto& e : loaded.shows) {
      for (const char* f : {"show.wav", "tokens.jsonl", "meta.json"}) {
        CHECK(fs::exists(e.dir / f));
        CHECK(slurp(e.dir / f) == slurp(b / e.id / f));
      }
    }
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    CHECK(loaded.select(Split::kTrain).size() + loaded.select(Split::kVal).size() +
              loaded.select(Split::kTest).size() == 3);
    fs::remove_all(b);
  }

  TEST_CASE("load_show round-trips tokens and labels") {
    const fs::path a = fs::temp_directory_path() / "audioseg_corpus_rt";
    fs::remove_all(a);
    auto cfg = small_config(true);
    make_benchmark(cfg, a);
    auto vocab = make_vocabulary(cfg);
    auto mem = synth_show(cfg, vocab, 2);
    auto disk = load_show(a / "show_002");
    REQUIRE(disk.tokens.size() == mem.tokens.size());
    CHECK(disk.labels == mem.labels);
    for (size_t i = 0; i < mem.tokens.size(); ++i) {
      CHECK(disk.tokens[i].word == mem.tokens[i].word);
      CHECK(disk.tokens[i].start == mem.tokens[i].start);
      CHECK(disk.tokens[i].end == mem.tokens[i].end);
    }
    CHECK(disk.audio.samples.size() == mem.audio.samples.size());
    for (size_t i = 0; i < mem.audio.samples.size(); i += 97)
      CHECK(std::abs(disk.audio.samples[i] - mem.audio.samples[i]) <= 1.0f / 32768);
    fs::remove_all(a);
  }

  TEST_CASE("chirps appear only in audio-informative corpora") {
    const fs::path on = fs::temp_directory_path() / "audioseg_corpus_on";
    const fs::path off = fs::temp_directory_path() / "audioseg_corpus_off";
    make_benchmark(small_config(true), on);
    make_benchmark(small_config(false), off);
    for (const auto& [root, expect] : {std::pair{on, true}, std::pair{off, false}}) {
      for (const auto& e : load_manifest(root).shows) {
        auto show = load_show(e.dir);
        for (const auto& span : show.fragments) {
          const double score = chirp_score(show.audio, show.tokens[span.first_token]);
          if (expect) CHECK(score > 0.99);
          else CHECK(score < 0.3);
        }
      }
    }
    fs::remove_all(on);
    fs::remove_all(off);
  }

  TEST_CASE("corrupt show files are data errors") {
    const fs::path d = fs::temp_directory_path() / "audioseg_corrupt_show";
    fs::remove_all(d);
    fs::create_directories(d);
    CHECK_THROWS_AS(load_show(d), DataError);
    std::ofstream(d / "tokens.jsonl") << "{\"word\": \"a\", \"t0\": 0.0}\n";
    CHECK_THROWS_AS(load_show(d), DataError);
    CHECK_THROWS_AS(load_manifest(d), DataError);
    fs::remove_all(d);
  }

  TEST_CASE("word vectors cluster by topic family") {
    CorpusConfig cfg;
    cfg.n_topics = 4;
    cfg.topic_families = 2;
    cfg.words_per_topic = 6;
    cfg.shared_words = 6;
    auto vocab = make_vocabulary(cfg);
    const std::string table = word_vector_table(cfg, vocab);
    CHECK(table == word_vector_table(cfg, vocab));
    std::map<std::string, std::vector<double>> vec;
    std::istringstream in(table);
    std::string line;
    while (std::getline(in, line)) {
      const size_t tab = line.find('\t');
      REQUIRE(tab != std::string::npos);
      std::istringstream values(line.substr(tab + 1));
      std::vector<double> v;
      for (double x; values >> x;) v.push_back(x);
      REQUIRE(v.size() == kWordVectorDim);
      double n2 = 0;
      for (double x : v) n2 += x * x;
      CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-5));
      vec[line.substr(0, tab)] = v;
    }
    CHECK(vec.size() == 4 * 6 + 6);
    auto cos = [&](const std::string& a, const std::string& b) {
      double d = 0;
      for (size_t i = 0; i < kWordVectorDim; ++i) d += vec.at(a)[i] * vec.at(b)[i];
      return d;
    };
    // Topics 0 and 2 share a family, 0 and 1 do not. With coherence c the
    // expected same-family cosine is c^2 / (c^2 + (1-c)^2) ~ 0.94.
    const auto& t = vocab.topical;
    CHECK(cos(t[0][0], t[2][1]) > 0.8);
    CHECK(cos(t[0][0], t[0][1]) > 0.8);
    CHECK(std::abs(cos(t[0][0], t[1][0])) < 0.3);
    CHECK(std::abs(cos(t[0][0], vocab.shared[0])) < 0.3);

    cfg.topic_coherence = 0.0;
    std::istringstream flat(word_vector_table(cfg, vocab));
    CHECK(std::count(std::istreambuf_iterator<char>(flat), {}, '\n') == 30);
  }

  TEST_CASE("manifest points at the word vector table") {
    const fs::path a = fs::temp_directory_path() / "audioseg_corpus_vec";
    fs::remove_all(a);
    auto cfg = small_config(true);
    make_benchmark(cfg, a);
    auto m = load_manifest(a);
    CHECK(m.word_vectors == a / "word_vectors.tsv");
    CHECK(slurp(m.word_vectors) == word_vector_table(cfg, make_vocabulary(cfg)));
    fs::remove_all(a);
  }

  TEST_CASE("config validation names the key") {
    CorpusConfig c;
    c.n_topics = 1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("topics"), UsageError);
    c = CorpusConfig{};
    c.topic_families = 9;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("topic_families"), UsageError);
    c = CorpusConfig{};
    c.topic_coherence = 1.5;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("topic_coherence"), UsageError);
  }
}

TEST_SUITE("clip generators") {
  TEST_CASE("tone clips are balanced") {
    auto t = make_tone_clips(5, 10, 3.0, 1);
    CHECK(t.clips.size() == 50);
    CHECK(t.class_names.size() == 5);
    std::vector<int> count(5);
    for (auto l : t.labels) ++count[l];
    for (int c : count) CHECK(c == 10);
    CHECK(t.clips[0].samples.size() == 3 * 44100);
  }

  TEST_CASE("sound events stay in range and are deterministic") {
    auto a = make_sound_event_clips(8, 2, 1.0, 3), b = make_sound_event_clips(8, 2, 1.0, 3);
    CHECK(a.clips.size() == 16);
    for (size_t i = 0; i < a.clips.size(); ++i) {
      CHECK(a.clips[i].samples == b.clips[i].samples);
      for (float s : a.clips[i].samples) REQUIRE(std::abs(s) <= 1.0f);
    }
    CHECK_THROWS_AS(make_sound_event_clips(9, 1, 1.0, 1), UsageError);
  }

  TEST_CASE("word clips and jingles") {
    auto w = make_word_clips({"x", "y"}, 3, 4, 0.25, 0.75, 1);
    CHECK(w.clips.size() == 6);
    for (const auto& c : w.clips) CHECK(c.samples.size() <= 44100);
    auto j = make_jingles(2, 3.0, 1);
    CHECK(j.size() == 2);
    CHECK(j[0].samples.size() == 3 * 44100);
  }
}
