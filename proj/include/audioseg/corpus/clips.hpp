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

// Labeled clip collections used to train the embedding generators.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "audioseg/corpus/synth.hpp"
#include "audioseg/dsp/waveform.hpp"

namespace audioseg::corpus {

struct LabeledClips {
  std::vector<dsp::Waveform> clips;
  std::vector<size_t> labels;
  std::vector<std::string> class_names;
};

// Sinusoids an octave apart starting at 200 Hz, with random detune,
// level, phase and a little white noise.
LabeledClips make_tone_clips(int n_classes, int per_class, double seconds, uint64_t seed);

// Up to 8 sound-event classes: rising sweep, falling sweep, low hum, high
// whistle, noise burst, click train, harmonic buzz, warble.
LabeledClips make_sound_event_clips(int n_classes, int per_class, double seconds,
                                    uint64_t seed);

// Short station idents: a chirp followed by a few tone steps.
std::vector<dsp::Waveform> make_jingles(int count, double seconds, uint64_t seed);

// Each word rendered `per_word` times with random duration and topic color.
LabeledClips make_word_clips(const std::vector<std::string>& words, int per_word,
                             int n_topics, double min_s, double max_s, uint64_t seed);

}  // namespace audioseg::corpus
