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

// One-second labeled spectrogram datasets for the three training recipes:
// sound events (SEC), fragment parts (FPC) and words (WC).

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "audioseg/corpus/clips.hpp"
#include "audioseg/dsp/mel.hpp"
#include "audioseg/dsp/waveform.hpp"
#include "audioseg/random.hpp"

namespace audioseg::generator {

enum class TaskTag { kSec, kFpc, kWc, kCustom };

std::string task_name(TaskTag t);  // "sec", "fpc", "wc", "custom"
TaskTag parse_task(const std::string& s);

struct LabeledClipDataset {
  std::vector<dsp::MelSpectrogram> items;
  std::vector<size_t> labels;
  std::vector<std::string> class_names;
  TaskTag task = TaskTag::kCustom;

  size_t size() const { return items.size(); }
  std::vector<size_t> class_counts() const;
  // Labels in range, spectrogram shapes, at least `min_per_class` items in
  // every class. Throws DataError.
  void validate(size_t min_per_class = 2) const;
};

// Clips are resampled to 44.1 kHz when needed and split into 1 s chunks,
// each inheriting its clip's label.
LabeledClipDataset build_sec_dataset(const corpus::LabeledClips& clips);

inline constexpr double kFpcTrimSeconds = 3.0;
inline constexpr double kFpcPartSeconds = 4.0;
inline constexpr double kFpcMinFragmentSeconds = 120.0;

struct FpcOptions {
  uint64_t seed = 0;
  // Keep at most this many items per class (0 keeps everything); items
  // are taken in fragment order.
  size_t per_class_cap = 0;
  double min_fragment_seconds = kFpcMinFragmentSeconds;
};

// Classes: begin, middle, end, jingle.
std::array<size_t, 4> plan_fpc_counts(size_t n_fragments, size_t jingle_items,
                                      size_t per_class_cap);

// Start sample of the random middle window for a fragment of `samples`
// samples; drawn after the 3 s trims and outside the begin/end windows.
size_t fpc_middle_offset(size_t samples, Rng& rng);

LabeledClipDataset build_fpc_dataset(const std::vector<dsp::Waveform>& fragments,
                                     const std::vector<dsp::Waveform>& jingles,
                                     const FpcOptions& options);

// Clips are zero-padded or truncated to one second; classes are words.
LabeledClipDataset build_wc_dataset(const corpus::LabeledClips& word_clips,
                                    size_t min_samples = 2);

}  // namespace audioseg::generator
