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

#include "audioseg/generator/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "audioseg/error.hpp"
#include "audioseg/nn/adam.hpp"
#include "audioseg/nn/tnsr.hpp"
#include "audioseg/random.hpp"
#include "json.hpp"

namespace audioseg::generator {
namespace fs = std::filesystem;
using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("generator.epochs must be at least 1");
  if (batch_size < 1) throw UsageError("generator.batch must be at least 1");
  if (!(lr > 0) || !std::isfinite(lr)) throw UsageError("generator.lr must be positive");
  if (!(val_fraction > 0 && val_fraction < 1)) {
    throw UsageError("generator.val_fraction must be in (0, 1)");
  }
}

std::string TrainConfig::to_json() const {
  json j;
  j["epochs"] = epochs;
  j["batch"] = batch_size;
  j["lr"] = lr;
  j["val_fraction"] = val_fraction;
  j["seed"] = seed;
  return j.dump();
}

Split stratified_split(const std::vector<size_t>& labels, size_t n_classes,
                       double val_fraction, uint64_t seed) {
  std::vector<std::vector<size_t>> by_class(n_classes);
  for (size_t i = 0; i < labels.size(); ++i) by_class.at(labels[i]).push_back(i);
  Rng rng(seed);
  Split split;
  for (size_t c = 0; c < n_classes; ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
                      " items; at least 2 are needed to split");
    }
    rng.shuffle(idx);
    size_t n_val = size_t(std::llround(val_fraction * double(idx.size())));
    n_val = std::min(n_val, idx.size() - 1);
    split.val.insert(split.val.end(), idx.begin(), idx.begin() + ptrdiff_t(n_val));
    split.train.insert(split.train.end(), idx.begin() + ptrdiff_t(n_val), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

nn::Tensor<float> to_input(const dsp::MelSpectrogram& spec) {
  if (spec.values.size() != dsp::kMelBands * dsp::kMelFrames) {
    throw DimensionError("spectrogram must be 128x87");
  }
  return nn::Tensor<float>({1, dsp::kMelBands, dsp::kMelFrames}, spec.values);
}

GeneratorModel init_generator(size_t n_classes, uint64_t seed, TaskTag task) {
  GeneratorModel m;
  m.net = build_network<float>(n_classes, seed);
  m.task = task;
  m.seed = seed;
  for (size_t c = 0; c < n_classes; ++c) m.class_names.push_back("class_" + std::to_string(c));
  return m;
}

Embedding embed(const GeneratorModel& model, const dsp::MelSpectrogram& spec) {
  nn::NoGradGuard no_grad;
  const auto out = forward(model.net, to_input(spec));
  Embedding e;
  std::copy(out.embedding.data().begin(), out.embedding.data().end(), e.begin());
  for (float v : e) {
    if (!std::isfinite(v)) throw NumericError("embed: non-finite activation");
  }
  return e;
}

size_t predict_class(const GeneratorModel& model, const dsp::MelSpectrogram& spec) {
  nn::NoGradGuard no_grad;
  const auto out = forward(model.net, to_input(spec));
  const auto logits = out.logits.data();
  return size_t(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double accuracy(const GeneratorModel& model, const LabeledClipDataset& ds,
                const std::vector<size_t>& indices) {
  if (indices.empty()) return 0.0;
  size_t correct = 0;
  for (size_t i : indices) correct += predict_class(model, ds.items[i]) == ds.labels[i];
  return double(correct) / double(indices.size());
}

TrainResult train_generator(const LabeledClipDataset& ds, const TrainConfig& cfg,
                            const EpochCallback& on_epoch) {
  cfg.validate();
  ds.validate(2);
  const size_t n_classes = ds.class_names.size();
  const Split split = stratified_split(ds.labels, n_classes, cfg.val_fraction,
                                       mix_seed(cfg.seed, 1));
  TrainResult result;
  GeneratorModel& model = result.model;
  model.net = build_network<float>(n_classes, mix_seed(cfg.seed, 2));
  model.task = ds.task;
  model.class_names = ds.class_names;
  model.seed = cfg.seed;
  model.config_json = cfg.to_json();

  std::vector<nn::Tensor<float>> best = model.net.params;
  for (auto& p : best) p = p.detach();
  double best_val = -1.0;
  auto state = nn::AdamState<float>::create(model.net.params, cfg.lr);
  Rng order_rng(mix_seed(cfg.seed, 3));
  std::vector<size_t> order = split.train;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    size_t correct = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      const float inv = 1.0f / float(end - start);
      for (auto& p : model.net.params) p.zero_grad();
      for (size_t b = start; b < end; ++b) {
        const size_t i = order[b];
        const auto out = forward(model.net, to_input(ds.items[i]));
        const auto logits = out.logits.data();
        correct += size_t(std::max_element(logits.begin(), logits.end()) - logits.begin()) ==
                   ds.labels[i];
        auto loss = nn::softmax_cross_entropy(out.logits, ds.labels[i]);
        const double value = loss.item();
        if (!std::isfinite(value)) {
          throw NumericError("train_generator: non-finite loss at epoch " + std::to_string(epoch));
        }
        loss_sum += value;
        nn::scale(loss, inv).backward();
      }
      nn::adam_update(std::span<nn::Tensor<float>>(model.net.params), state);
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / double(order.size());
    log.train_accuracy = double(correct) / double(order.size());
    log.val_accuracy = accuracy(model, ds, split.val);
    result.log.push_back(log);
    model.epochs_trained = epoch;
    if (log.val_accuracy > best_val) {
      best_val = log.val_accuracy;
      model.best_epoch = epoch;
      model.train_accuracy = log.train_accuracy;
      for (size_t p = 0; p < best.size(); ++p) {
        std::copy(model.net.params[p].data().begin(), model.net.params[p].data().end(),
                  best[p].mutable_data().begin());
      }
    }
    if (on_epoch && !on_epoch(log)) break;
  }
  for (size_t p = 0; p < best.size(); ++p) {
    std::copy(best[p].data().begin(), best[p].data().end(),
              model.net.params[p].mutable_data().begin());
    model.net.params[p].zero_grad();
  }
  model.val_accuracy = best_val;
  return result;
}

void save_generator(const GeneratorModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  json meta;
  meta["format"] = "audioseg-generator";
  meta["task_tag"] = task_name(model.task);
  meta["n_classes"] = model.n_classes();
  meta["embedding_dim"] = kEmbeddingDim;
  meta["input"] = {model.net.input_height, model.net.input_width};
  meta["class_names"] = model.class_names;
  meta["epochs_trained"] = model.epochs_trained;
  meta["best_epoch"] = model.best_epoch;
  meta["val_accuracy"] = model.val_accuracy;
  meta["train_accuracy"] = model.train_accuracy;
  meta["seed"] = model.seed;
  meta["config"] = json::parse(model.config_json);
  meta["params"] = model.net.names;
  for (size_t i = 0; i < model.net.params.size(); ++i) {
    nn::write_tensor(dir / (model.net.names[i] + ".tnsr"), model.net.params[i]);
  }
  std::ofstream out(dir / "meta.json");
  out << meta.dump(2) << "\n";
  if (!out) throw DataError("cannot write " + (dir / "meta.json").string());
}

GeneratorModel load_generator(const fs::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw DataError("no generator checkpoint at " + dir.string());
  GeneratorModel model;
  try {
    const json meta = json::parse(in);
    if (meta.at("format").get<std::string>() != "audioseg-generator") {
      throw DataError(dir.string() + " is not a generator checkpoint");
    }
    const auto input = meta.at("input").get<std::vector<size_t>>();
    if (input.size() != 2) throw DataError("generator meta.json: bad input shape");
    model.net = build_network<float>(meta.at("n_classes").get<size_t>(), 0, input[0], input[1]);
    model.task = parse_task(meta.at("task_tag").get<std::string>());
    model.class_names = meta.at("class_names").get<std::vector<std::string>>();
    model.epochs_trained = meta.at("epochs_trained").get<int>();
    model.best_epoch = meta.at("best_epoch").get<int>();
    model.val_accuracy = meta.at("val_accuracy").get<double>();
    model.train_accuracy = meta.at("train_accuracy").get<double>();
    model.seed = meta.at("seed").get<uint64_t>();
    model.config_json = meta.at("config").dump();
  } catch (const json::exception& e) {
    throw DataError((dir / "meta.json").string() + ": " + e.what());
  }
  for (size_t i = 0; i < model.net.params.size(); ++i) {
    const auto loaded = nn::read_tensor<float>(dir / (model.net.names[i] + ".tnsr"));
    if (loaded.shape() != model.net.params[i].shape()) {
      throw DataError(model.net.names[i] + ".tnsr has shape " + nn::shape_str(loaded.shape()) +
                      ", expected " + nn::shape_str(model.net.params[i].shape()));
    }
    std::copy(loaded.data().begin(), loaded.data().end(),
              model.net.params[i].mutable_data().begin());
  }
  return model;
}

}  // namespace audioseg::generator
