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
// Experiment orchestration. Each stage caches its artifact under
// RunConfig::cache in a directory named by a hash of everything that
// determines it, so a rerun with the same configuration reuses it.
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "audioseg/corpus/benchmark.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/pipeline/config.hpp"
#include "audioseg/pipeline/results.hpp"
#include "audioseg/segmenter/segmenter.hpp"

namespace audioseg::pipeline {

using Logger = std::function<void(const std::string&)>;

// Runs `body`, rethrowing any audioseg::Error (and filesystem errors, as
// data errors) with "stage <name>: " prepended and the kind preserved.
void run_stage(const std::string& name, const std::function<void()>& body);

// The corpus from RunConfig::corpus_path, or the cached synthetic corpus.
corpus::CorpusManifest ensure_corpus(const RunConfig& cfg, const Logger& log = {});

// Word vectors for the text block as selected by RunConfig::text_embeddings.
segmenter::WordEmbedder make_embedder(const RunConfig& cfg, const corpus::CorpusManifest& corpus);

// Synthetic training set for one generator task, built from its recipe.
generator::LabeledClipDataset recipe_dataset(const RunConfig& cfg, generator::TaskTag task);

// Training set from audio files listed in a JSON manifest. Paths are
// relative to the manifest. For "sec" and "wc":
//   {"task": "sec", "items": [{"path": "a.wav", "label": "dog"}, ...]}
// For "fpc", long program fragments and jingles:
//   {"task": "fpc", "fragments": ["f1.wav", ...], "jingles": ["j1.wav", ...]}
generator::LabeledClipDataset load_clip_manifest(const std::filesystem::path& path,
                                                 uint64_t seed);

generator::TrainConfig training_config(const RunConfig& cfg, generator::TaskTag task);

// Cache key of a generator stage.
std::string generator_key(const RunConfig& cfg, generator::TaskTag task);

// The configured checkpoint, or the cached model trained from the recipe.
generator::GeneratorModel ensure_generator(const RunConfig& cfg, generator::TaskTag task,
                                           const Logger& log = {});

// Trains the segmenter of one method on the corpus train and validation
// shows (or takes it from the cache) and writes it to `bundle_dir` as a
// bundle with its feature sources.
segmenter::SegmenterModel train_method(const RunConfig& cfg, const segmenter::FeatureConfig& method,
                                       const std::filesystem::path& bundle_dir,
                                       const Logger& log = {});

// Trains, predicts and evaluates every method, then compares them against
// the baseline. Writes nothing outside the cache; see write_experiment.
ExperimentReport run_experiment(const RunConfig& cfg, const Logger& log = {});

}  // namespace audioseg::pipeline
