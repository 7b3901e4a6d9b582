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

#include "audioseg/generator/dataset.hpp"

#include <algorithm>

#include "audioseg/dsp/resample.hpp"
#include "audioseg/error.hpp"
#include "audioseg/random.hpp"

namespace audioseg::generator {
namespace {

constexpr const char* kFpcClasses[] = {"begin", "middle", "end", "jingle"};

size_t seconds(double s) { return size_t(s * dsp::kTargetRate); }

dsp::Waveform at_target_rate(const dsp::Waveform& w) {
  return w.sample_rate == dsp::kTargetRate ? w : dsp::resample_to_44100(w);
}

void add_chunks(LabeledClipDataset& ds, const dsp::Waveform& w, size_t label,
                size_t cap) {
  for (const auto& chunk : dsp::chunk_clip(w)) {
    if (cap && std::count(ds.labels.begin(), ds.labels.end(), label) >= ptrdiff_t(cap)) return;
    ds.items.push_back(dsp::mel_spectrogram(chunk));
    ds.labels.push_back(label);
  }
}

}  // namespace

std::string task_name(TaskTag t) {
  switch (t) {
    case TaskTag::kSec: return "sec";
    case TaskTag::kFpc: return "fpc";
    case TaskTag::kWc: return "wc";
    case TaskTag::kCustom: return "custom";
  }
  return "custom";
}

TaskTag parse_task(const std::string& s) {
  if (s == "sec") return TaskTag::kSec;
  if (s == "fpc") return TaskTag::kFpc;
  if (s == "wc") return TaskTag::kWc;
  if (s == "custom") return TaskTag::kCustom;
  throw UsageError("unknown task '" + s + "' (expected sec, fpc, wc or custom)");
}

std::vector<size_t> LabeledClipDataset::class_counts() const {
  std::vector<size_t> counts(class_names.size(), 0);
  for (size_t l : labels)
    if (l < counts.size()) ++counts[l];
  return counts;
}

void LabeledClipDataset::validate(size_t min_per_class) const {
  if (class_names.empty()) throw DataError("dataset has no classes");
  if (items.size() != labels.size()) throw DataError("dataset items and labels differ in count");
  for (size_t i = 0; i < items.size(); ++i) {
    if (labels[i] >= class_names.size()) {
      throw DataError("item " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                      " but only " + std::to_string(class_names.size()) + " classes exist");
    }
    if (items[i].values.size() != dsp::kMelBands * dsp::kMelFrames) {
      throw DataError("item " + std::to_string(i) + " is not a 128x87 spectrogram");
    }
  }
  const auto counts = class_counts();
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < min_per_class) {
      throw DataError("class '" + class_names[c] + "' has " + std::to_string(counts[c]) +
                      " items, need at least " + std::to_string(min_per_class));
    }
  }
}

LabeledClipDataset build_sec_dataset(const corpus::LabeledClips& clips) {
  if (clips.clips.size() != clips.labels.size()) {
    throw DataError("sec dataset: clips and labels differ in count");
  }
  LabeledClipDataset ds;
  ds.task = TaskTag::kSec;
  ds.class_names = clips.class_names;
  for (size_t i = 0; i < clips.clips.size(); ++i) {
    if (clips.labels[i] >= ds.class_names.size()) {
      throw DataError("sec dataset: clip " + std::to_string(i) + " has an unknown class");
    }
    add_chunks(ds, at_target_rate(clips.clips[i]), clips.labels[i], 0);
  }
  const auto counts = ds.class_counts();
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw DataError("sec dataset: class '" + ds.class_names[c] + "' is empty");
  }
  return ds;
}

std::array<size_t, 4> plan_fpc_counts(size_t n_fragments, size_t jingle_items,
                                      size_t per_class_cap) {
  const size_t per_part = n_fragments * size_t(kFpcPartSeconds);
  auto cap = [&](size_t n) { return per_class_cap ? std::min(n, per_class_cap) : n; };
  return {cap(per_part), cap(per_part), cap(per_part), cap(jingle_items)};
}

size_t fpc_middle_offset(size_t samples, Rng& rng) {
  const size_t lo = seconds(kFpcTrimSeconds + kFpcPartSeconds);
  const size_t part = seconds(kFpcPartSeconds);
  if (samples < 2 * lo + part) throw DataError("fpc: fragment too short for the recipe");
  const size_t hi = samples - lo - part;  // inclusive
  return lo + size_t(rng.below(hi - lo + 1));
}

LabeledClipDataset build_fpc_dataset(const std::vector<dsp::Waveform>& fragments,
                                     const std::vector<dsp::Waveform>& jingles,
                                     const FpcOptions& options) {
  LabeledClipDataset ds;
  ds.task = TaskTag::kFpc;
  ds.class_names.assign(std::begin(kFpcClasses), std::end(kFpcClasses));
  Rng rng(options.seed);
  const size_t trim = seconds(kFpcTrimSeconds), part = seconds(kFpcPartSeconds);
  for (size_t f = 0; f < fragments.size(); ++f) {
    const auto w = at_target_rate(fragments[f]);
    if (w.duration() < options.min_fragment_seconds) {
      throw DataError("fpc: fragment " + std::to_string(f) + " lasts " +
                      std::to_string(w.duration()) + " s, the recipe needs at least " +
                      std::to_string(options.min_fragment_seconds) + " s");
    }
    const size_t n = w.samples.size();
    const size_t middle = fpc_middle_offset(n, rng);
    add_chunks(ds, dsp::slice_samples(w, trim, trim + part), 0, options.per_class_cap);
    add_chunks(ds, dsp::slice_samples(w, middle, middle + part), 1, options.per_class_cap);
    add_chunks(ds, dsp::slice_samples(w, n - trim - part, n - trim), 2, options.per_class_cap);
  }
  for (const auto& j : jingles) add_chunks(ds, at_target_rate(j), 3, options.per_class_cap);
  return ds;
}

LabeledClipDataset build_wc_dataset(const corpus::LabeledClips& word_clips,
                                    size_t min_samples) {
  if (word_clips.clips.size() != word_clips.labels.size()) {
    throw DataError("wc dataset: clips and labels differ in count");
  }
  LabeledClipDataset ds;
  ds.task = TaskTag::kWc;
  ds.class_names = word_clips.class_names;
  for (size_t i = 0; i < word_clips.clips.size(); ++i) {
    if (word_clips.labels[i] >= ds.class_names.size()) {
      throw DataError("wc dataset: clip " + std::to_string(i) + " has an unknown word");
    }
    ds.items.push_back(dsp::mel_spectrogram(dsp::fit_to_one_second(at_target_rate(word_clips.clips[i]))));
    ds.labels.push_back(word_clips.labels[i]);
  }
  const auto counts = ds.class_counts();
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < min_samples) {
      throw DataError("wc dataset: word '" + ds.class_names[c] + "' has " +
                      std::to_string(counts[c]) + " samples, need " + std::to_string(min_samples));
    }
  }
  return ds;
}

}  // namespace audioseg::generator
