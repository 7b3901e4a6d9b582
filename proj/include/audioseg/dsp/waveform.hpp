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

#pragma once

#include <cstdint>
#include <vector>

namespace audioseg::dsp {

inline constexpr uint32_t kTargetRate = 44100;

// Mono audio. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  uint32_t sample_rate = kTargetRate;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Exactly one second at 44.1 kHz: trailing zero padding or truncation.
Waveform fit_to_one_second(const Waveform& w);

// Consecutive non-overlapping chunks; a trailing remainder shorter than one
// chunk is dropped. Throws DataError when not even one chunk fits.
std::vector<Waveform> chunk_clip(const Waveform& w, double chunk_seconds = 1.0);

// Samples [begin, end) clipped to the waveform, as a new waveform.
Waveform slice_samples(const Waveform& w, size_t begin, size_t end);

}  // namespace audioseg::dsp
