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

// Synthetic stand-in for topical radio audio: "words" are short harmonic
// tone bursts whose pitch is keyed by the word text and whose spectral
// envelope is colored by the topic. Fragments optionally open with a
// rising chirp that plays the role of a jingle.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "audioseg/dsp/waveform.hpp"

namespace audioseg::corpus {

inline constexpr double kChirpSeconds = 0.5;
inline constexpr double kChirpStartHz = 500.0;
inline constexpr double kChirpEndHz = 4000.0;

struct ToneSignature {
  double formant_hz = 1000.0;  // center of the spectral emphasis
  double tilt = 1.0;           // harmonic roll-off exponent
};

struct TopicSpec {
  int topic_id = 0;
  std::vector<std::string> words;
  std::vector<double> weights;  // same length as words; need not sum to 1
  ToneSignature tone;
  bool boundary_cue = false;
  double duration_s = 20.0;
  double word_min_s = 0.25;
  double word_max_s = 0.75;
};

// Everything needed to re-synthesize a token's samples.
struct WordToken {
  std::string word;
  size_t start = 0;  // samples, relative to the parent audio
  size_t end = 0;
  int topic_id = 0;
  bool cue = false;  // audio is the chirp rather than the word

  double t0() const { return double(start) / dsp::kTargetRate; }
  double t1() const { return double(end) / dsp::kTargetRate; }
  size_t length() const { return end - start; }
};

struct Fragment {
  int topic_id = 0;
  std::vector<WordToken> tokens;
  dsp::Waveform audio;
  double duration() const { return audio.duration(); }
};

struct FragmentSpan {
  int topic_id = 0;
  size_t first_token = 0;
  size_t token_count = 0;
  size_t start_sample = 0;
  size_t end_sample = 0;
};

struct Show {
  std::vector<WordToken> tokens;
  std::vector<uint8_t> labels;  // 1 on the first token of fragments 2..n
  dsp::Waveform audio;
  std::vector<FragmentSpan> fragments;
};

// Pitch of a word in [100, 400) Hz, a pure function of its text.
double word_pitch(const std::string& word);

// Harmonic burst for `word` with a 10 ms raised-cosine fade at both ends.
std::vector<float> synth_word(const std::string& word, size_t samples,
                              const ToneSignature& tone);

// Linear sweep 500 -> 4000 Hz.
std::vector<float> synth_chirp(size_t samples);

// Samples of one token, as they appear in its parent audio.
std::vector<float> synth_token(const WordToken& token, const ToneSignature& tone);

ToneSignature topic_tone(int topic_id, int n_topics);

// Draws words until the running duration reaches `spec.duration_s`.
Fragment synth_fragment(const TopicSpec& spec, uint64_t seed);

// Concatenates fragments until the duration reaches `target_seconds`; the
// last fragment is always included whole.
Show build_show(const std::vector<Fragment>& fragments, double target_seconds);

}  // namespace audioseg::corpus
