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

#include "audioseg/dsp/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "audioseg/error.hpp"

namespace audioseg::dsp {

Waveform fit_to_one_second(const Waveform& w) {
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(kTargetRate, 0.0f);
  const size_t n = std::min<size_t>(w.samples.size(), kTargetRate);
  std::copy_n(w.samples.begin(), n, out.samples.begin());
  return out;
}

std::vector<Waveform> chunk_clip(const Waveform& w, double chunk_seconds) {
  if (chunk_seconds <= 0.0) throw UsageError("chunk_clip: chunk length must be positive");
  const auto chunk = static_cast<size_t>(std::llround(chunk_seconds * w.sample_rate));
  if (chunk == 0 || w.samples.size() < chunk) {
    throw DataError("chunk_clip: clip of " + std::to_string(w.duration()) +
                    " s is shorter than one " + std::to_string(chunk_seconds) +
                    " s chunk");
  }
  std::vector<Waveform> out;
  for (size_t start = 0; start + chunk <= w.samples.size(); start += chunk) {
    out.push_back(slice_samples(w, start, start + chunk));
  }
  return out;
}

Waveform slice_samples(const Waveform& w, size_t begin, size_t end) {
  end = std::min(end, w.samples.size());
  begin = std::min(begin, end);
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     w.samples.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace audioseg::dsp
