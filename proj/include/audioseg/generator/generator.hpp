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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "audioseg/dsp/mel.hpp"
#include "audioseg/generator/dataset.hpp"
#include "audioseg/generator/network.hpp"

namespace audioseg::generator {

struct TrainConfig {
  int epochs = 1400;
  size_t batch_size = 32;
  double lr = 1e-6;
  double val_fraction = 0.1;
  uint64_t seed = 0;

  void validate() const;
  std::string to_json() const;
};

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;  // running accuracy over the epoch's batches
  double val_accuracy = 0.0;
};

struct GeneratorModel {
  VggNet<float> net;
  TaskTag task = TaskTag::kCustom;
  std::vector<std::string> class_names;
  int epochs_trained = 0;
  int best_epoch = 0;
  double val_accuracy = 0.0;
  double train_accuracy = 0.0;
  uint64_t seed = 0;
  std::string config_json = "{}";

  size_t n_classes() const { return net.n_classes; }
};

struct TrainResult {
  GeneratorModel model;  // parameters of the best validation epoch
  std::vector<EpochLog> log;
};

struct Split {
  std::vector<size_t> train;
  std::vector<size_t> val;
};

// Per class: seeded shuffle, round(val_fraction * count) items to val,
// always leaving at least one in train.
Split stratified_split(const std::vector<size_t>& labels, size_t n_classes,
                       double val_fraction, uint64_t seed);

// Called after every epoch; returning false ends training early.
using EpochCallback = std::function<bool(const EpochLog&)>;

TrainResult train_generator(const LabeledClipDataset& ds, const TrainConfig& cfg,
                            const EpochCallback& on_epoch = {});

// Untrained model, e.g. for golden-file checks.
GeneratorModel init_generator(size_t n_classes, uint64_t seed, TaskTag task = TaskTag::kCustom);

nn::Tensor<float> to_input(const dsp::MelSpectrogram& spec);

using Embedding = std::array<float, kEmbeddingDim>;

// Activations of the 30-unit pre-softmax layer. Thread-safe on a shared model.
Embedding embed(const GeneratorModel& model, const dsp::MelSpectrogram& spec);
size_t predict_class(const GeneratorModel& model, const dsp::MelSpectrogram& spec);
double accuracy(const GeneratorModel& model, const LabeledClipDataset& ds,
                const std::vector<size_t>& indices);

// Directory of <param>.tnsr files plus meta.json.
void save_generator(const GeneratorModel& model, const std::filesystem::path& dir);
GeneratorModel load_generator(const std::filesystem::path& dir);

}  // namespace audioseg::generator
