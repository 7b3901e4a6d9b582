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
// File-level operations behind the individual command-line stages.
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "audioseg/dsp/mel.hpp"
#include "audioseg/dsp/waveform.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/pipeline/results.hpp"

namespace audioseg::pipeline {

enum class ClipMode {
  kChunk,  // consecutive whole one-second chunks; a shorter tail is dropped
  kFit,    // the whole clip padded or truncated to one second
};

// Log-Mel spectrograms of a clip after mono mixdown and resampling.
std::vector<dsp::MelSpectrogram> clip_spectrograms(const dsp::Waveform& w, ClipMode mode);

// Every *.wav below `in` becomes <out>/<relative path>.tnsr holding a
// [n, 128, 87] float tensor. Returns the number of files written; files
// are processed in sorted path order.
size_t preprocess_dir(const std::filesystem::path& in, const std::filesystem::path& out,
                      ClipMode mode);

// Every *.tnsr spectrogram stack (or *.wav clip, chunked) below `in`
// becomes <out>/<relative path>.tnsr holding [n, 30] embeddings.
size_t embed_dir(const generator::GeneratorModel& model, const std::filesystem::path& in,
                 const std::filesystem::path& out, size_t threads = 1);

// Scores prediction files against the corpus shows named by their file
// stems. Rows follow the order of `predictions`. The table records `seed`,
// or the corpus seed when none is given.
ResultsTable evaluate_predictions(const std::vector<std::filesystem::path>& predictions,
                                  const std::filesystem::path& corpus_dir, size_t k,
                                  const std::string& method,
                                  std::optional<uint64_t> seed = std::nullopt);

// Expands directories to the *.jsonl files inside them, sorted.
std::vector<std::filesystem::path> expand_prediction_paths(
    const std::vector<std::filesystem::path>& paths);

}  // namespace audioseg::pipeline
