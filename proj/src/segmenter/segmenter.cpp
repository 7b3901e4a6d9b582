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

#include "audioseg/segmenter/segmenter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "audioseg/error.hpp"
#include "audioseg/nn/adam.hpp"
#include "audioseg/nn/tnsr.hpp"
#include "audioseg/random.hpp"
#include "json.hpp"

namespace audioseg::segmenter {
namespace fs = std::filesystem;
using nlohmann::json;
using nn::Tensor;

std::vector<Tensor<float>> SegmenterModel::parameters() const {
  return {lstm.input_weights, lstm.recurrent_weights, lstm.bias, output_weights, output_bias};
}

const std::vector<std::string>& SegmenterModel::parameter_names() {
  static const std::vector<std::string> names{"lstm.input_weights", "lstm.recurrent_weights",
                                              "lstm.bias", "output.weights", "output.bias"};
  return names;
}

namespace {

void require_features(const FeatureConfig& features) {
  if (features.empty()) throw UsageError("segmenter needs at least one feature block");
}

void require_units(size_t units) {
  if (units == 0) throw UsageError("segmenter units must be at least 1");
}

void require_input(const SegmenterModel& model, const FeatureMatrix& x) {
  if (x.cols != model.input_dim()) {
    throw DimensionError("features have " + std::to_string(x.cols) + " columns but the " +
                         model.features.tag() + " segmenter expects " +
                         std::to_string(model.input_dim()));
  }
  if (x.values.size() != x.rows * x.cols) {
    throw DimensionError("feature matrix holds " + std::to_string(x.values.size()) +
                         " values, expected " + std::to_string(x.rows * x.cols));
  }
}

using Snapshot = std::vector<std::vector<float>>;

Snapshot snapshot(const SegmenterModel& m) {
  Snapshot s;
  for (const auto& p : m.parameters()) s.emplace_back(p.data().begin(), p.data().end());
  return s;
}

void restore(SegmenterModel& m, const Snapshot& s) {
  auto params = m.parameters();
  for (size_t i = 0; i < params.size(); ++i) {
    std::copy(s[i].begin(), s[i].end(), params[i].mutable_data().begin());
  }
}

}  // namespace

SegmenterModel init_segmenter(const FeatureConfig& features, size_t units, uint64_t seed) {
  require_features(features);
  require_units(units);
  Rng rng(seed);
  SegmenterModel m;
  m.features = features;
  m.seed = seed;
  m.lstm = nn::init_lstm<float>(features.dim(), units, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(units));
  std::vector<float> w(units);
  for (float& x : w) x = static_cast<float>(rng.uniform(-bound, bound));
  m.output_weights = Tensor<float>({1, units}, std::move(w), true);
  m.output_bias = Tensor<float>::zeros({1}, true);
  return m;
}

SegmenterModel zero_segmenter(const FeatureConfig& features, size_t units) {
  require_features(features);
  require_units(units);
  SegmenterModel m;
  m.features = features;
  m.lstm.input_weights = Tensor<float>::zeros({4 * units, features.dim()}, true);
  m.lstm.recurrent_weights = Tensor<float>::zeros({4 * units, units}, true);
  m.lstm.bias = Tensor<float>::zeros({4 * units}, true);
  m.output_weights = Tensor<float>::zeros({1, units}, true);
  m.output_bias = Tensor<float>::zeros({1}, true);
  return m;
}

template <typename T>
Tensor<T> tagger_logits(const nn::LstmParams<T>& lstm, const Tensor<T>& output_weights,
                        const Tensor<T>& output_bias, std::span<const T> inputs, size_t steps,
                        nn::LstmState<T>& state) {
  const size_t d = lstm.input_size();
  if (steps == 0 || inputs.size() != steps * d) {
    throw DimensionError("tagger: " + std::to_string(inputs.size()) + " inputs for " +
                         std::to_string(steps) + " steps of width " + std::to_string(d));
  }
  std::vector<Tensor<T>> logits;
  logits.reserve(steps);
  for (size_t t = 0; t < steps; ++t) {
    Tensor<T> x({d}, std::vector<T>(inputs.begin() + t * d, inputs.begin() + (t + 1) * d));
    state = nn::lstm_step(x, state, lstm);
    logits.push_back(nn::dense(state.h, output_weights, output_bias));
  }
  return nn::concat<T>(logits);
}

template Tensor<float> tagger_logits(const nn::LstmParams<float>&, const Tensor<float>&,
                                     const Tensor<float>&, std::span<const float>, size_t,
                                     nn::LstmState<float>&);
template Tensor<double> tagger_logits(const nn::LstmParams<double>&, const Tensor<double>&,
                                      const Tensor<double>&, std::span<const double>, size_t,
                                      nn::LstmState<double>&);

void check_threshold(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw UsageError("threshold tau must lie strictly between 0 and 1, got " + std::to_string(tau));
  }
}

eval::Boundaries apply_threshold(std::span<const double> probs, double tau) {
  check_threshold(tau);
  eval::Boundaries b(probs.size(), 0);
  for (size_t i = 1; i < probs.size(); ++i) b[i] = probs[i] >= tau ? 1 : 0;
  return b;
}

std::vector<double> predict_probs(const SegmenterModel& model, const FeatureMatrix& x) {
  require_input(model, x);
  if (x.rows == 0) return {};
  nn::NoGradGuard no_grad;
  auto state = nn::lstm_zero_state<float>(model.units());
  const Tensor<float> z = tagger_logits<float>(model.lstm, model.output_weights,
                                               model.output_bias, x.values, x.rows, state);
  std::vector<double> probs(x.rows);
  for (size_t i = 0; i < x.rows; ++i) {
    probs[i] = 1.0 / (1.0 + std::exp(-static_cast<double>(z.at(i))));
  }
  return probs;
}

Prediction predict(const SegmenterModel& model, const FeatureMatrix& x) {
  check_threshold(model.tau);
  Prediction p;
  p.probs = predict_probs(model, x);
  p.boundaries = apply_threshold(p.probs, model.tau);
  return p;
}

LabeledSequence label_sequence(const corpus::Show& show, FeatureMatrix features) {
  if (features.rows != show.tokens.size() || show.labels.size() != show.tokens.size()) {
    throw DimensionError("show has " + std::to_string(show.tokens.size()) + " tokens and " +
                         std::to_string(show.labels.size()) + " labels but " +
                         std::to_string(features.rows) + " feature rows");
  }
  return {std::move(features), show.labels};
}

double positive_weight(std::span<const LabeledSequence> data) {
  size_t pos = 0, total = 0;
  for (const auto& s : data) {
    for (uint8_t y : s.labels) pos += y != 0;
    total += s.labels.size();
  }
  if (pos == 0) throw DataError("training data contains no boundary tokens");
  return static_cast<double>(total - pos) / static_cast<double>(pos);
}

void SegTrainConfig::validate() const {
  if (units.empty() || learning_rates.empty() || thresholds.empty()) {
    throw UsageError("segmenter.grid: units, lr and tau lists must be non-empty");
  }
  for (size_t u : units) {
    if (u == 0) throw UsageError("segmenter.grid.units: values must be at least 1");
  }
  for (double lr : learning_rates) {
    if (!(lr > 0) || !std::isfinite(lr)) {
      throw UsageError("segmenter.grid.lr: values must be positive");
    }
  }
  for (double t : thresholds) {
    if (!(t > 0 && t < 1)) throw UsageError("segmenter.grid.tau: values must lie in (0, 1)");
  }
  if (epochs < 1) throw UsageError("segmenter.epochs must be at least 1");
  if (bptt_window < 1) throw UsageError("segmenter.bptt must be at least 1");
  if (window_k < 1) throw UsageError("segmenter.k must be at least 1");
  if (threads < 1) throw UsageError("segmenter threads must be at least 1");
}

std::string SegTrainConfig::to_json() const {
  json j;
  j["units"] = units;
  j["lr"] = learning_rates;
  j["tau"] = thresholds;
  j["epochs"] = epochs;
  j["bptt"] = bptt_window;
  j["k"] = window_k;
  j["seed"] = seed;
  return j.dump();
}

namespace {

void check_sequences(std::span<const LabeledSequence> data, size_t dim, const char* what) {
  for (size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    if (s.features.cols != dim) {
      throw DimensionError(std::string(what) + " sequence " + std::to_string(i) + " has " +
                           std::to_string(s.features.cols) + " feature columns, expected " +
                           std::to_string(dim));
    }
    if (s.labels.size() != s.features.rows || s.features.rows == 0) {
      throw DimensionError(std::string(what) + " sequence " + std::to_string(i) + " has " +
                           std::to_string(s.labels.size()) + " labels for " +
                           std::to_string(s.features.rows) + " feature rows");
    }
  }
}

// Mean WinPR F1 over the validation shows, one value per threshold.
std::vector<double> validation_f1(const SegmenterModel& model,
                                  std::span<const LabeledSequence> val,
                                  const SegTrainConfig& cfg) {
  std::vector<std::vector<double>> probs;
  std::vector<eval::Boundaries> refs;
  for (const auto& s : val) {
    probs.push_back(predict_probs(model, s.features));
    refs.push_back(s.labels);
  }
  std::vector<double> out;
  for (double tau : cfg.thresholds) {
    std::vector<eval::Boundaries> hyp;
    for (const auto& p : probs) hyp.push_back(apply_threshold(p, tau));
    out.push_back(eval::evaluate_corpus(hyp, refs, cfg.window_k).f1);
  }
  return out;
}

}  // namespace

FitResult fit_segmenter(std::span<const LabeledSequence> train,
                        std::span<const LabeledSequence> val, const FeatureConfig& features,
                        size_t units, double lr, const SegTrainConfig& cfg,
                        const SegEpochCallback& on_epoch) {
  cfg.validate();
  require_features(features);
  if (train.empty()) throw UsageError("segmenter training needs at least one show");
  check_sequences(train, features.dim(), "training");
  check_sequences(val, features.dim(), "validation");
  const float pos_weight = static_cast<float>(positive_weight(train));

  FitResult result;
  SegmenterModel model = init_segmenter(features, units, mix_seed(cfg.seed, units));
  model.lr = lr;
  model.seed = cfg.seed;
  model.config_json = cfg.to_json();
  auto params = model.parameters();
  auto adam = nn::AdamState<float>::create(params, lr);
  Rng order_rng(mix_seed(cfg.seed, 0x6f72646572ULL + units));

  const size_t n_tau = cfg.thresholds.size();
  std::vector<double> best_f1(n_tau, -1.0);
  std::vector<int> best_epoch(n_tau, 0);
  std::vector<Snapshot> best_params(n_tau);

  std::vector<size_t> order(train.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    size_t tokens = 0;
    for (size_t idx : order) {
      const LabeledSequence& seq = train[idx];
      const size_t d = seq.features.cols;
      auto state = nn::lstm_zero_state<float>(units);
      for (size_t w0 = 0; w0 < seq.features.rows; w0 += cfg.bptt_window) {
        const size_t len = std::min(cfg.bptt_window, seq.features.rows - w0);
        for (auto& p : params) p.zero_grad();
        const Tensor<float> logits = tagger_logits<float>(
            model.lstm, model.output_weights, model.output_bias,
            std::span<const float>(seq.features.values).subspan(w0 * d, len * d), len, state);
        std::vector<float> targets(seq.labels.begin() + w0, seq.labels.begin() + w0 + len);
        Tensor<float> loss = nn::bce_with_logits<float>(logits, targets, pos_weight);
        if (!std::isfinite(loss.item())) {
          throw NumericError("segmenter loss diverged at epoch " + std::to_string(epoch));
        }
        loss.backward();
        nn::adam_update<float>(params, adam);
        state = {state.h.detach(), state.c.detach()};
        loss_sum += static_cast<double>(loss.item()) * static_cast<double>(len);
        tokens += len;
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(tokens);
    if (!val.empty()) {
      rec.val_f1 = validation_f1(model, val, cfg);
      for (size_t t = 0; t < n_tau; ++t) {
        if (rec.val_f1[t] > best_f1[t]) {
          best_f1[t] = rec.val_f1[t];
          best_epoch[t] = epoch;
          best_params[t] = snapshot(model);
        }
      }
    }
    result.log.push_back(rec);
    model.epochs_trained = epoch;
    if (on_epoch && !on_epoch(rec)) break;
  }

  size_t chosen = 0;
  for (size_t t = 0; t < n_tau; ++t) {
    GridPoint g{units, lr, cfg.thresholds[t], 0.0, model.epochs_trained};
    if (!val.empty()) {
      g.val_f1 = best_f1[t];
      g.best_epoch = best_epoch[t];
      if (best_f1[t] > best_f1[chosen]) chosen = t;
    }
    result.points.push_back(g);
  }
  if (!val.empty()) restore(model, best_params[chosen]);
  model.tau = cfg.thresholds[chosen];
  model.val_f1 = result.points[chosen].val_f1;
  model.best_epoch = result.points[chosen].best_epoch;
  result.model = std::move(model);
  return result;
}

SegTrainResult train_segmenter(std::span<const LabeledSequence> train,
                               std::span<const LabeledSequence> val,
                               const FeatureConfig& features, const SegTrainConfig& cfg) {
  cfg.validate();
  if (val.empty()) throw UsageError("segmenter grid search needs validation shows");
  if (train.empty()) throw UsageError("segmenter training needs at least one show");
  positive_weight(train);  // fail before spawning workers

  std::vector<std::pair<size_t, double>> pairs;
  for (size_t u : cfg.units) {
    for (double lr : cfg.learning_rates) pairs.emplace_back(u, lr);
  }
  std::vector<FitResult> fits(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < pairs.size();) {
      try {
        fits[i] = fit_segmenter(train, val, features, pairs[i].first, pairs[i].second, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t n_workers = std::min(cfg.threads, pairs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SegTrainResult result;
  size_t best_fit = 0;
  for (size_t i = 0; i < fits.size(); ++i) {
    result.grid.insert(result.grid.end(), fits[i].points.begin(), fits[i].points.end());
    if (fits[i].model.val_f1 > fits[best_fit].model.val_f1) best_fit = i;
  }
  result.model = std::move(fits[best_fit].model);
  result.log = std::move(fits[best_fit].log);
  return result;
}

void save_segmenter(const SegmenterModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  json meta;
  meta["format"] = "audioseg-segmenter";
  meta["feature_cfg"] = model.features.tag();
  meta["input_dim"] = model.input_dim();
  meta["u"] = model.units();
  meta["lr"] = model.lr;
  meta["tau"] = model.tau;
  meta["seed"] = model.seed;
  meta["val_f1"] = model.val_f1;
  meta["epochs_trained"] = model.epochs_trained;
  meta["best_epoch"] = model.best_epoch;
  meta["config"] = json::parse(model.config_json);
  meta["params"] = SegmenterModel::parameter_names();
  const auto params = model.parameters();
  for (size_t i = 0; i < params.size(); ++i) {
    nn::write_tensor(dir / (SegmenterModel::parameter_names()[i] + ".tnsr"), params[i]);
  }
  std::ofstream out(dir / "meta.json");
  out << meta.dump(2) << "\n";
  if (!out) throw DataError("cannot write " + (dir / "meta.json").string());
}

SegmenterModel load_segmenter(const fs::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw DataError("no segmenter checkpoint at " + dir.string());
  SegmenterModel model;
  try {
    const json meta = json::parse(in);
    if (meta.at("format").get<std::string>() != "audioseg-segmenter") {
      throw DataError(dir.string() + " is not a segmenter checkpoint");
    }
    const FeatureConfig features = FeatureConfig::parse(meta.at("feature_cfg").get<std::string>());
    const size_t units = meta.at("u").get<size_t>();
    if (meta.at("input_dim").get<size_t>() != features.dim()) {
      throw DataError("segmenter meta.json: input_dim does not match feature_cfg " +
                      features.tag());
    }
    model = zero_segmenter(features, units);
    model.lr = meta.at("lr").get<double>();
    model.tau = meta.at("tau").get<double>();
    model.seed = meta.at("seed").get<uint64_t>();
    model.val_f1 = meta.at("val_f1").get<double>();
    model.epochs_trained = meta.at("epochs_trained").get<int>();
    model.best_epoch = meta.at("best_epoch").get<int>();
    model.config_json = meta.at("config").dump();
  } catch (const json::exception& e) {
    throw DataError((dir / "meta.json").string() + ": " + e.what());
  } catch (const UsageError& e) {
    throw DataError((dir / "meta.json").string() + ": " + e.what());
  }
  check_threshold(model.tau);
  auto params = model.parameters();
  for (size_t i = 0; i < params.size(); ++i) {
    const std::string& name = SegmenterModel::parameter_names()[i];
    const auto loaded = nn::read_tensor<float>(dir / (name + ".tnsr"));
    if (loaded.shape() != params[i].shape()) {
      throw DataError(name + ".tnsr has shape " + nn::shape_str(loaded.shape()) + ", expected " +
                      nn::shape_str(params[i].shape()));
    }
    std::copy(loaded.data().begin(), loaded.data().end(), params[i].mutable_data().begin());
  }
  return model;
}

}  // namespace audioseg::segmenter
