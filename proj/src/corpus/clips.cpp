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

#include "audioseg/corpus/clips.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "audioseg/error.hpp"
#include "audioseg/random.hpp"

namespace audioseg::corpus {
namespace {

constexpr double kRate = dsp::kTargetRate;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

size_t samples_for(double seconds) {
  if (!(seconds > 0)) throw UsageError("clip length must be positive");
  return size_t(std::llround(seconds * kRate));
}

dsp::Waveform wave(std::vector<float> s) { return {std::move(s), dsp::kTargetRate}; }

// Phase-continuous sweep between two frequencies, log-spaced.
void add_sweep(std::vector<float>& out, double f_start, double f_end, double amp) {
  double phase = 0.0;
  const double n = double(out.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const double f = f_start * std::pow(f_end / f_start, double(i) / n);
    phase += kTwoPi * f / kRate;
    out[i] += float(amp * std::sin(phase));
  }
}

void add_noise(std::vector<float>& out, Rng& rng, double amp) {
  for (float& x : out) x += float(amp * rng.uniform(-1.0, 1.0));
}

std::vector<float> sound_event(int cls, size_t n, Rng& rng) {
  std::vector<float> out(n, 0.0f);
  const double amp = rng.uniform(0.2, 0.6);
  switch (cls) {
    case 0:  // rising sweep
      add_sweep(out, rng.uniform(300, 700), rng.uniform(3000, 6000), amp);
      break;
    case 1:  // falling sweep
      add_sweep(out, rng.uniform(3000, 6000), rng.uniform(300, 700), amp);
      break;
    case 2: {  // low hum with a couple of harmonics
      const double f = rng.uniform(60, 140);
      for (int h = 1; h <= 3; ++h) add_sweep(out, f * h, f * h, amp / h);
      break;
    }
    case 3:  // high whistle
      add_sweep(out, rng.uniform(5000, 8000), rng.uniform(5000, 8000), amp);
      break;
    case 4: {  // noise bursts
      const size_t burst = size_t(rng.uniform(0.05, 0.2) * kRate);
      for (size_t start = size_t(rng.below(burst)); start < n; start += 2 * burst)
        for (size_t i = start; i < std::min(n, start + burst); ++i)
          out[i] = float(amp * rng.uniform(-1.0, 1.0));
      break;
    }
    case 5: {  // click train
      const size_t period = size_t(kRate / rng.uniform(4, 20));
      for (size_t start = size_t(rng.below(period)); start < n; start += period)
        for (size_t i = 0; i < 80 && start + i < n; ++i)
          out[start + i] = float(amp * std::exp(-double(i) / 12.0) * (i % 2 ? -1 : 1));
      break;
    }
    case 6: {  // harmonic buzz (sawtooth-like)
      const double f = rng.uniform(150, 400);
      for (int h = 1; h * f < 10000; ++h) add_sweep(out, f * h, f * h, amp / (1.5 * h));
      break;
    }
    case 7: {  // warble: frequency-modulated tone
      const double fc = rng.uniform(800, 2000), rate = rng.uniform(4, 12);
      double phase = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const double f = fc * (1.0 + 0.2 * std::sin(kTwoPi * rate * double(i) / kRate));
        phase += kTwoPi * f / kRate;
        out[i] = float(amp * std::sin(phase));
      }
      break;
    }
    default:
      throw UsageError("unknown sound event class");
  }
  add_noise(out, rng, 0.01);
  return out;
}

}  // namespace

LabeledClips make_tone_clips(int n_classes, int per_class, double seconds, uint64_t seed) {
  if (n_classes < 2 || n_classes > 6) throw UsageError("tone clips: 2..6 classes");
  if (per_class < 1) throw UsageError("tone clips: per_class must be positive");
  const size_t n = samples_for(seconds);
  Rng rng(seed);
  LabeledClips out;
  for (int c = 0; c < n_classes; ++c)
    out.class_names.push_back("tone_" + std::to_string(200 << c) + "hz");
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < n_classes; ++c) {
      const double f = double(200 << c) * rng.uniform(0.97, 1.03);
      const double amp = rng.uniform(0.1, 0.8), phase = rng.uniform(0, kTwoPi);
      std::vector<float> s(n);
      for (size_t t = 0; t < n; ++t)
        s[t] = float(amp * std::sin(kTwoPi * f * double(t) / kRate + phase) +
                     0.02 * amp * rng.uniform(-1.0, 1.0));
      out.clips.push_back(wave(std::move(s)));
      out.labels.push_back(size_t(c));
    }
  }
  return out;
}

LabeledClips make_sound_event_clips(int n_classes, int per_class, double seconds,
                                    uint64_t seed) {
  static const char* kNames[] = {"rising_sweep", "falling_sweep", "low_hum",
                                 "high_whistle", "noise_burst",   "click_train",
                                 "harmonic_buzz", "warble"};
  if (n_classes < 2 || n_classes > int(std::size(kNames)))
    throw UsageError("sound events: 2..8 classes");
  if (per_class < 1) throw UsageError("sound events: per_class must be positive");
  const size_t n = samples_for(seconds);
  Rng rng(seed);
  LabeledClips out;
  out.class_names.assign(kNames, kNames + n_classes);
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < n_classes; ++c) {
      out.clips.push_back(wave(sound_event(c, n, rng)));
      out.labels.push_back(size_t(c));
    }
  }
  return out;
}

std::vector<dsp::Waveform> make_jingles(int count, double seconds, uint64_t seed) {
  const size_t n = samples_for(seconds);
  Rng rng(seed);
  std::vector<dsp::Waveform> out;
  for (int j = 0; j < count; ++j) {
    std::vector<float> s(n, 0.0f);
    const size_t chirp_len = std::min(n, samples_for(kChirpSeconds));
    const auto chirp = synth_chirp(chirp_len);
    std::copy(chirp.begin(), chirp.end(), s.begin());
    const double base = rng.uniform(400, 900);
    const size_t step = std::max<size_t>(1, (n - chirp_len) / 4);
    for (size_t k = 0; chirp_len + k * step < n; ++k) {
      const double f = base * std::pow(2.0, double(rng.below(12)) / 12.0);
      for (size_t i = chirp_len + k * step; i < std::min(n, chirp_len + (k + 1) * step); ++i)
        s[i] = float(0.35 * std::sin(kTwoPi * f * double(i) / kRate));
    }
    out.push_back(wave(std::move(s)));
  }
  return out;
}

LabeledClips make_word_clips(const std::vector<std::string>& words, int per_word,
                             int n_topics, double min_s, double max_s, uint64_t seed) {
  if (words.empty()) throw UsageError("word clips: empty word list");
  if (per_word < 1) throw UsageError("word clips: per_word must be positive");
  if (!(min_s > 0) || max_s < min_s || max_s > 1.0)
    throw UsageError("word clips: need 0 < min <= max <= 1 s");
  Rng rng(seed);
  LabeledClips out;
  out.class_names = words;
  for (int i = 0; i < per_word; ++i) {
    for (size_t w = 0; w < words.size(); ++w) {
      const auto tone = topic_tone(int(rng.below(uint64_t(std::max(1, n_topics)))),
                                   std::max(1, n_topics));
      const size_t len = samples_for(rng.uniform(min_s, max_s));
      out.clips.push_back(wave(synth_word(words[w], len, tone)));
      out.labels.push_back(w);
    }
  }
  return out;
}

}  // namespace audioseg::corpus
