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

// Per-token feature matrices: a 300-d word block followed by one 30-d audio
// embedding block per generator, always in the order text, SEC, FPC, WC.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "audioseg/corpus/synth.hpp"
#include "audioseg/dsp/mel.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/segmenter/word_embedding.hpp"

namespace audioseg::segmenter {

struct FeatureConfig {
  bool text = false;
  bool sec = false;
  bool fpc = false;
  bool wc = false;

  // "TXT", "SEC", "TXT+SEC", ...; all four blocks give "ALL".
  std::string tag() const;
  size_t dim() const;
  bool empty() const { return !(text || sec || fpc || wc); }
  size_t audio_blocks() const { return size_t(sec) + size_t(fpc) + size_t(wc); }
  // Audio tasks in block order.
  std::vector<generator::TaskTag> audio_tasks() const;

  // Case-insensitive tags joined by '+', e.g. "txt+sec" or "all".
  static FeatureConfig parse(std::string_view tag);

  bool operator==(const FeatureConfig&) const = default;
};

// Row-major [rows][cols].
struct FeatureMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(size_t i) const { return {values.data() + i * cols, cols}; }
  bool operator==(const FeatureMatrix&) const = default;
};

// Word vectors of every token, [m][300].
FeatureMatrix text_block(const corpus::Show& show, const WordEmbedder& words);

// Log-Mel of a token's audio after padding or truncating it to one second.
// Throws DataError when the token's samples are not in the show audio.
dsp::MelSpectrogram token_spectrogram(const corpus::Show& show, size_t token);

// Generator embeddings of every token, [m][30]. Tokens are split across
// `threads` workers; the result does not depend on the thread count.
FeatureMatrix audio_block(const corpus::Show& show, const generator::GeneratorModel& model,
                          size_t threads = 1);

// Column-wise concatenation of blocks with equal row counts.
FeatureMatrix concat_blocks(std::span<const FeatureMatrix* const> blocks);

// Generators must carry distinct SEC/FPC/WC task tags; they may be given
// in any order. Throws UsageError if nothing is requested.
FeatureMatrix assemble_features(const corpus::Show& show,
                                const std::vector<const generator::GeneratorModel*>& generators,
                                bool use_text, const WordEmbedder& words = {},
                                size_t threads = 1);

// The configuration that assemble_features would produce.
FeatureConfig feature_config_of(const std::vector<const generator::GeneratorModel*>& generators,
                                bool use_text);

}  // namespace audioseg::segmenter
