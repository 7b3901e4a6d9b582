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

#include "audioseg/corpus/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "audioseg/error.hpp"
#include "audioseg/random.hpp"

namespace audioseg::corpus {
namespace {

constexpr double kRate = dsp::kTargetRate;
constexpr double kMaxHarmonicHz = 8000.0;
constexpr double kFadeSeconds = 0.01;
constexpr double kPeak = 0.3;

void apply_fade(std::vector<float>& x) {
  const size_t fade = std::min<size_t>(size_t(kFadeSeconds * kRate), x.size() / 2);
  for (size_t i = 0; i < fade; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * double(i) / double(fade));
    x[i] = float(x[i] * g);
    x[x.size() - 1 - i] = float(x[x.size() - 1 - i] * g);
  }
}

size_t seconds_to_samples(double s) { return size_t(std::llround(s * kRate)); }

}  // namespace

double word_pitch(const std::string& word) {
  const double u = double(fnv1a64(word) >> 11) * 0x1.0p-53;
  return 100.0 + 300.0 * u;
}

std::vector<float> synth_word(const std::string& word, size_t samples,
                              const ToneSignature& tone) {
  const double f0 = word_pitch(word);
  // Second partial keyed by the word as well, so neighbouring pitches
  // still differ in timbre.
  const double shimmer = double(fnv1a64(word, 0x84222325cbf29ce4ULL) >> 11) * 0x1.0p-53;
  std::vector<double> amps;
  for (int h = 1; h * f0 < kMaxHarmonicHz; ++h) {
    const double f = h * f0;
    const double octaves = std::log2(f / tone.formant_hz);
    const double formant = std::exp(-0.5 * octaves * octaves / 0.36);
    amps.push_back((0.15 + formant) * std::pow(double(h), -tone.tilt) *
                   (h == 2 ? 0.5 + shimmer : 1.0));
  }
  const double norm = kPeak / std::accumulate(amps.begin(), amps.end(), 0.0);
  std::vector<float> out(samples);
  for (size_t n = 0; n < samples; ++n) {
    // sin((h+1)x) = 2 cos(x) sin(hx) - sin((h-1)x)
    const double x = 2.0 * std::numbers::pi * f0 * double(n) / kRate;
    const double two_cos = 2.0 * std::cos(x);
    double prev = 0.0, cur = std::sin(x), acc = 0.0;
    for (double a : amps) {
      acc += a * cur;
      const double next = two_cos * cur - prev;
      prev = cur;
      cur = next;
    }
    out[n] = float(acc * norm);
  }
  apply_fade(out);
  return out;
}

std::vector<float> synth_chirp(size_t samples) {
  const double duration = double(samples) / kRate;
  const double slope = (kChirpEndHz - kChirpStartHz) / duration;
  std::vector<float> out(samples);
  for (size_t n = 0; n < samples; ++n) {
    const double t = double(n) / kRate;
    const double phase = 2.0 * std::numbers::pi * (kChirpStartHz * t + 0.5 * slope * t * t);
    out[n] = float(0.5 * std::sin(phase));
  }
  apply_fade(out);
  return out;
}

std::vector<float> synth_token(const WordToken& token, const ToneSignature& tone) {
  return token.cue ? synth_chirp(token.length())
                   : synth_word(token.word, token.length(), tone);
}

ToneSignature topic_tone(int topic_id, int n_topics) {
  const double pos = n_topics > 1 ? double(topic_id) / double(n_topics - 1) : 0.5;
  ToneSignature s;
  s.formant_hz = 300.0 * std::pow(2.0, 3.5 * pos);  // 300 Hz .. ~3.4 kHz
  s.tilt = 0.5 + 0.5 * double(topic_id % 3);
  return s;
}

Fragment synth_fragment(const TopicSpec& spec, uint64_t seed) {
  if (spec.words.empty()) throw DataError("synth_fragment: empty vocabulary");
  if (spec.weights.size() != spec.words.size()) {
    throw DimensionError("synth_fragment: vocabulary and weights differ in length");
  }
  if (!(spec.word_min_s > 0.0) || spec.word_max_s < spec.word_min_s || spec.word_max_s > 1.0) {
    throw UsageError("synth_fragment: word durations must satisfy 0 < min <= max <= 1 s");
  }
  if (!(spec.duration_s > 0.0)) throw UsageError("synth_fragment: duration must be positive");
  std::vector<double> cumulative(spec.weights.size());
  std::partial_sum(spec.weights.begin(), spec.weights.end(), cumulative.begin());
  if (!(cumulative.back() > 0.0)) throw DataError("synth_fragment: vocabulary weights sum to 0");

  Rng rng(seed);
  Fragment frag;
  frag.topic_id = spec.topic_id;
  const size_t target = seconds_to_samples(spec.duration_s);
  size_t cursor = 0;
  while (cursor < target) {
    WordToken tok;
    const double u = rng.uniform() * cumulative.back();
    const size_t w = std::min<size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin(),
        spec.words.size() - 1);
    tok.word = spec.words[w];
    tok.topic_id = spec.topic_id;
    const double seconds = rng.uniform(spec.word_min_s, spec.word_max_s);
    tok.cue = spec.boundary_cue && frag.tokens.empty();
    const size_t len = seconds_to_samples(tok.cue ? kChirpSeconds : seconds);
    tok.start = cursor;
    tok.end = cursor + len;
    cursor = tok.end;
    const auto samples = synth_token(tok, spec.tone);
    frag.audio.samples.insert(frag.audio.samples.end(), samples.begin(), samples.end());
    frag.tokens.push_back(std::move(tok));
  }
  return frag;
}

Show build_show(const std::vector<Fragment>& fragments, double target_seconds) {
  if (fragments.size() < 2) throw DataError("build_show: need at least 2 fragments");
  if (!(target_seconds > 0.0)) throw UsageError("build_show: target must be positive");
  const size_t target = seconds_to_samples(target_seconds);
  Show show;
  size_t needed = 0;
  for (size_t f = 0; f < fragments.size() && needed < target; ++f)
    needed += fragments[f].audio.samples.size();
  show.audio.samples.reserve(needed);
  for (size_t f = 0; f < fragments.size() && show.audio.samples.size() < target; ++f) {
    const Fragment& frag = fragments[f];
    if (f > 0 && frag.topic_id == fragments[f - 1].topic_id) {
      throw DataError("build_show: fragments " + std::to_string(f - 1) + " and " +
                      std::to_string(f) + " share topic " + std::to_string(frag.topic_id));
    }
    const size_t offset = show.audio.samples.size();
    FragmentSpan span{frag.topic_id, show.tokens.size(), frag.tokens.size(), offset,
                      offset + frag.audio.samples.size()};
    for (size_t i = 0; i < frag.tokens.size(); ++i) {
      WordToken tok = frag.tokens[i];
      tok.start += offset;
      tok.end += offset;
      show.tokens.push_back(std::move(tok));
      show.labels.push_back(i == 0 && f > 0 ? 1 : 0);
    }
    show.audio.samples.insert(show.audio.samples.end(), frag.audio.samples.begin(),
                              frag.audio.samples.end());
    show.fragments.push_back(span);
  }
  if (show.audio.samples.size() * 10 < target) {
    throw DataError("build_show: fragments run out before 10% of the target duration");
  }
  return show;
}

}  // namespace audioseg::corpus
