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
// A trained segmenter packaged with its feature sources: the word-vector
// table (unless words are hashed) and one generator per audio block, so a
// single show directory is enough to predict.
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "audioseg/corpus/synth.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/segmenter/segmenter.hpp"

namespace audioseg::pipeline {

struct SegmenterBundle {
  segmenter::SegmenterModel model;
  segmenter::WordEmbedder words;
  std::map<generator::TaskTag, generator::GeneratorModel> generators;

  segmenter::FeatureMatrix features(const corpus::Show& show, size_t threads = 1) const;
  segmenter::Prediction predict(const corpus::Show& show, size_t threads = 1) const;
};

// The segmenter files plus bundle.json, word_vectors.tsv (when
// `word_table` is given) and generator-<task>/ checkpoints.
void save_bundle(const std::filesystem::path& dir, const segmenter::SegmenterModel& model,
                 const std::filesystem::path& word_table,
                 const std::map<generator::TaskTag, const generator::GeneratorModel*>& generators);
// Throws DataError when a feature source the model needs is missing.
SegmenterBundle load_bundle(const std::filesystem::path& dir);

// One JSON object per token: {"index", "prob", "boundary"}.
std::string predictions_jsonl(const segmenter::Prediction& p);
// Boundaries of a predictions file; indices must run 0..n-1.
eval::Boundaries read_predictions(const std::filesystem::path& path);

}  // namespace audioseg::pipeline
