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

#include "audioseg/dsp/waveform.hpp"

namespace audioseg::dsp {

// Rational-ratio polyphase resampler built from a Kaiser-windowed sinc.
// The ratio out/in is reduced to L/M; each of the L phases holds
// `taps_per_phase` coefficients normalized to unit DC gain.
class PolyphaseResampler {
 public:
  PolyphaseResampler(uint32_t in_rate, uint32_t out_rate,
                     size_t taps_per_phase = 64, double kaiser_beta = 8.0,
                     double rolloff = 0.9);

  // Output length is ceil(n * L / M); samples beyond the input are zero.
  std::vector<float> process(const std::vector<float>& input) const;

  uint32_t up() const { return up_; }
  uint32_t down() const { return down_; }

 private:
  uint32_t up_ = 1, down_ = 1;
  size_t taps_ = 64;
  std::vector<double> table_;  // [phase][tap]
};

// Brings any rate >= 8000 Hz to 44.1 kHz; 44.1 kHz input is returned as is.
Waveform resample_to_44100(const Waveform& w);

}  // namespace audioseg::dsp
