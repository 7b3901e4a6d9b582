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

// LSTM boundary tagger: a one-layer unidirectional LSTM over the token
// feature rows, a dense layer to one logit per token, and a decision
// threshold on the sigmoid output.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "audioseg/eval/winpr.hpp"
#include "audioseg/nn/layers.hpp"
#include "audioseg/segmenter/features.hpp"

namespace audioseg::segmenter {

struct SegmenterModel {
  FeatureConfig features;
  nn::LstmParams<float> lstm;
  nn::Tensor<float> output_weights;  // [1, units]
  nn::Tensor<float> output_bias;     // [1]
  double tau = 0.5;
  double lr = 0.0;
  uint64_t seed = 0;
  double val_f1 = 0.0;
  int epochs_trained = 0;
  int best_epoch = 0;
  std::string config_json = "{}";

  size_t input_dim() const { return lstm.input_size(); }
  size_t units() const { return lstm.units(); }
  std::vector<nn::Tensor<float>> parameters() const;
  static const std::vector<std::string>& parameter_names();
};

struct Prediction {
  std::vector<double> probs;
  eval::Boundaries boundaries;
};

// Seeded initialization: LSTM as in init_lstm, output layer
// uniform(-1/sqrt(units), 1/sqrt(units)) with zero bias.
SegmenterModel init_segmenter(const FeatureConfig& features, size_t units, uint64_t seed);
// Every parameter zero, so every probability is exactly 0.5.
SegmenterModel zero_segmenter(const FeatureConfig& features, size_t units);

// Unrolls the tagger over `steps` rows of `inputs` (row-major, steps x d)
// starting from `state`, which is replaced by the final state. Returns the
// [steps] logits with the graph attached.
template <typename T>
nn::Tensor<T> tagger_logits(const nn::LstmParams<T>& lstm, const nn::Tensor<T>& output_weights,
                            const nn::Tensor<T>& output_bias, std::span<const T> inputs,
                            size_t steps, nn::LstmState<T>& state);

// Throws UsageError unless 0 < tau < 1.
void check_threshold(double tau);
// probs >= tau, with token 0 always 0.
eval::Boundaries apply_threshold(std::span<const double> probs, double tau);

// Sigmoid outputs of a full left-to-right pass. Thread-safe.
std::vector<double> predict_probs(const SegmenterModel& model, const FeatureMatrix& x);
Prediction predict(const SegmenterModel& model, const FeatureMatrix& x);

struct LabeledSequence {
  FeatureMatrix features;
  eval::Boundaries labels;
};

// Pairs a show's features with its labels exactly as the corpus stores them.
LabeledSequence label_sequence(const corpus::Show& show, FeatureMatrix features);

// #non-boundary / #boundary over all tokens. Throws DataError when there
// is no boundary.
double positive_weight(std::span<const LabeledSequence> data);

struct SegTrainConfig {
  std::vector<size_t> units{32, 64, 128};
  std::vector<double> learning_rates{1e-3, 1e-4};
  std::vector<double> thresholds{0.3, 0.5, 0.7};
  int epochs = 30;
  size_t bptt_window = 256;
  size_t window_k = 10;  // WinPR window used for model selection
  uint64_t seed = 0;
  size_t threads = 1;  // grid points trained concurrently

  void validate() const;
  std::string to_json() const;  // excludes threads
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  std::vector<double> val_f1;  // one per threshold, empty without validation
};

struct GridPoint {
  size_t units = 0;
  double lr = 0.0;
  double tau = 0.0;
  double val_f1 = 0.0;
  int best_epoch = 0;
};

struct SegTrainResult {
  SegmenterModel model;
  std::vector<GridPoint> grid;     // units-major, then lr, then tau
  std::vector<EpochRecord> log;    // of the (units, lr) pair that won
};

// Trains one (units, lr) pair for cfg.epochs epochs with truncated BPTT.
// With validation data each threshold keeps the parameters of its best
// epoch and the best (threshold, epoch) is returned; without, the final
// parameters and the first threshold. `on_epoch` may stop training early.
using SegEpochCallback = std::function<bool(const EpochRecord&)>;
struct FitResult {
  SegmenterModel model;
  std::vector<GridPoint> points;  // one per threshold
  std::vector<EpochRecord> log;
};
FitResult fit_segmenter(std::span<const LabeledSequence> train,
                        std::span<const LabeledSequence> val, const FeatureConfig& features,
                        size_t units, double lr, const SegTrainConfig& cfg,
                        const SegEpochCallback& on_epoch = {});

// Grid search over units x lr x tau, selecting the highest validation
// WinPR F1; ties go to the earlier grid point.
SegTrainResult train_segmenter(std::span<const LabeledSequence> train,
                               std::span<const LabeledSequence> val,
                               const FeatureConfig& features, const SegTrainConfig& cfg);

// Directory of <param>.tnsr files plus meta.json.
void save_segmenter(const SegmenterModel& model, const std::filesystem::path& dir);
SegmenterModel load_segmenter(const std::filesystem::path& dir);

}  // namespace audioseg::segmenter
