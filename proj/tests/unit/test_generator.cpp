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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <set>

#include "audioseg/corpus/clips.hpp"
#include "audioseg/error.hpp"
#include "audioseg/generator/generator.hpp"
#include "audioseg/nn/grad_check.hpp"
#include "audioseg/nn/tnsr.hpp"
#include "doctest.h"

using namespace audioseg;
using namespace audioseg::generator;
namespace fs = std::filesystem;

namespace {

dsp::Waveform sine(double hz, double seconds, double amp = 0.5, uint32_t rate = 44100) {
  dsp::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(size_t(seconds * rate));
  for (size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = float(amp * std::sin(2 * std::numbers::pi * hz * i / rate));
  return w;
}

dsp::MelSpectrogram reference_spec() {
  dsp::Waveform w{std::vector<float>(44100), 44100};
  for (size_t i = 0; i < 44100; ++i) {
    const double t = i / 44100.0;
    w.samples[i] = float(0.5 * std::sin(2 * std::numbers::pi * 440 * t) +
                         0.25 * std::sin(2 * std::numbers::pi * 3000 * t + 0.3));
  }
  return dsp::mel_spectrogram(w);
}

// 200 Hz vs 4 kHz tones with random level, one second each.
LabeledClipDataset two_tone_dataset(int per_class, uint64_t seed) {
  corpus::LabeledClips clips;
  clips.class_names = {"low", "high"};
  Rng rng(seed);
  for (int i = 0; i < per_class; ++i) {
    clips.clips.push_back(sine(200 * rng.uniform(0.95, 1.05), 1.0, rng.uniform(0.1, 0.8)));
    clips.labels.push_back(0);
    clips.clips.push_back(sine(4000 * rng.uniform(0.95, 1.05), 1.0, rng.uniform(0.1, 0.8)));
    clips.labels.push_back(1);
  }
  return build_sec_dataset(clips);
}

double cosine(const Embedding& a, const Embedding& b) {
  double ab = 0, aa = 0, bb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace

TEST_SUITE("generator datasets") {
  TEST_CASE("one 1 s clip gives one item") {
    corpus::LabeledClips c{{sine(440, 1.0)}, {0}, {"a"}};
    auto ds = build_sec_dataset(c);
    CHECK(ds.size() == 1);
    CHECK(ds.task == TaskTag::kSec);
  }

  TEST_CASE("5 classes x 10 clips x 3 s gives 150 balanced items") {
    auto clips = corpus::make_tone_clips(5, 10, 3.0, 7);
    auto ds = build_sec_dataset(clips);
    CHECK(ds.size() == 150);
    for (size_t c : ds.class_counts()) CHECK(c == 30);
    ds.validate();
  }

  TEST_CASE("chunk arithmetic at full recipe scale") {
    // 50 classes x 40 clips x 5 s; counts only.
    CHECK(50 * 40 * dsp::chunk_clip(sine(1, 5.0, 0.0)).size() == 10000);
  }

  TEST_CASE("clips at other rates are resampled before chunking") {
    corpus::LabeledClips c{{sine(440, 2.5, 0.5, 48000), sine(880, 1.0)}, {0, 1}, {"a", "b"}};
    auto ds = build_sec_dataset(c);
    CHECK(ds.size() == 3);
  }

  TEST_CASE("a class that loses all clips is an error") {
    corpus::LabeledClips c{{sine(440, 1.0)}, {0}, {"a", "b"}};
    CHECK_THROWS_AS(build_sec_dataset(c), DataError);
    corpus::LabeledClips short_clip{{sine(440, 0.5)}, {0}, {"a"}};
    CHECK_THROWS_AS(build_sec_dataset(short_clip), DataError);
  }

  TEST_CASE("one two-minute fragment yields 12 items over three classes") {
    auto ds = build_fpc_dataset({sine(300, 120.0, 0.2)}, {}, {});
    CHECK(ds.size() == 12);
    auto counts = ds.class_counts();
    CHECK(counts == std::vector<size_t>{4, 4, 4, 0});
  }

  TEST_CASE("fpc count plan reconciles 2500 fragments with 12000 items") {
    auto plan = plan_fpc_counts(2500, 3000, 3000);
    CHECK(plan[0] + plan[1] + plan[2] + plan[3] == 12000);
    auto uncapped = plan_fpc_counts(1, 0, 0);
    CHECK(uncapped[0] + uncapped[1] + uncapped[2] == 12);
  }

  TEST_CASE("fpc classes stay balanced and jingles form the fourth class") {
    std::vector<dsp::Waveform> frags{sine(300, 125.0, 0.2), sine(500, 130.0, 0.2)};
    auto jingles = corpus::make_jingles(2, 3.0, 1);
    auto ds = build_fpc_dataset(frags, jingles, {});
    auto counts = ds.class_counts();
    CHECK(counts[0] == 8);
    CHECK(counts[1] == 8);
    CHECK(counts[2] == 8);
    CHECK(counts[3] == 6);
    FpcOptions capped;
    capped.per_class_cap = 5;
    auto small = build_fpc_dataset(frags, jingles, capped);
    CHECK(small.class_counts() == std::vector<size_t>{5, 5, 5, 5});
  }

  TEST_CASE("middle windows are seeded and stay inside the interior") {
    const size_t n = 44100 * 150;
    Rng a(5), b(5);
    for (int i = 0; i < 200; ++i) {
      const size_t off = fpc_middle_offset(n, a);
      CHECK(off == fpc_middle_offset(n, b));
      CHECK(off >= 7 * 44100);
      CHECK(off + 4 * 44100 <= n - 7 * 44100);
    }
  }

  TEST_CASE("short fragments are rejected") {
    CHECK_THROWS_AS(build_fpc_dataset({sine(300, 60.0)}, {}, {}), DataError);
  }

  TEST_CASE("word datasets") {
    corpus::LabeledClips two{{sine(300, 0.4), sine(300, 0.4)}, {0, 0}, {"hello"}};
    auto ds = build_wc_dataset(two);
    CHECK(ds.size() == 2);
    CHECK(ds.class_names.size() == 1);
    CHECK(ds.items[0].values == ds.items[1].values);

    std::vector<std::string> words;
    for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
    auto wc = build_wc_dataset(corpus::make_word_clips(words, 3, 4, 0.25, 0.75, 2));
    CHECK(wc.class_names.size() == 20);
    for (size_t c : wc.class_counts()) CHECK(c == 3);

    corpus::LabeledClips lonely{{sine(300, 0.4)}, {0}, {"solo"}};
    CHECK_THROWS_AS(build_wc_dataset(lonely), DataError);
  }

  TEST_CASE("stratified split keeps every class in train") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
      const size_t k = 2 + rng.below(6);
      std::vector<size_t> labels;
      std::vector<size_t> counts(k);
      for (size_t c = 0; c < k; ++c) {
        counts[c] = 2 + rng.below(40);
        for (size_t i = 0; i < counts[c]; ++i) labels.push_back(c);
      }
      auto s = stratified_split(labels, k, 0.1, t);
      CHECK(s.train.size() + s.val.size() == labels.size());
      std::vector<size_t> tr(k), va(k);
      for (size_t i : s.train) ++tr[labels[i]];
      for (size_t i : s.val) ++va[labels[i]];
      for (size_t c = 0; c < k; ++c) {
        CHECK(tr[c] >= 1);
        CHECK(std::abs(double(va[c]) - 0.1 * counts[c]) <= 1.0);
      }
    }
    CHECK_THROWS_AS(stratified_split({0, 1, 1}, 2, 0.1, 1), DataError);
  }
}

TEST_SUITE("generator network") {
  TEST_CASE("classifier width follows the class count") {
    for (size_t n : {50u, 4u, 300u}) {
      auto net = build_network<float>(n, 1);
      CHECK(net.params.back().dim(0) == n);
      CHECK(net.params[net.params.size() - 3].dim(0) == kEmbeddingDim);
    }
    CHECK_THROWS_AS(build_network<float>(1, 1), UsageError);
  }

  TEST_CASE("parameter count for two classes") {
    // Written out layer by layer: (k*k*cin + 1) * cout per conv.
    const size_t convs = (9 * 1 + 1) * 16 + (9 * 16 + 1) * 16 + (9 * 16 + 1) * 32 +
                         (9 * 32 + 1) * 32 + (9 * 32 + 1) * 64 + (9 * 64 + 1) * 64 +
                         (9 * 64 + 1) * 128 + (9 * 128 + 1) * 128;
    const size_t dense = (5120 + 1) * 256 + (256 + 1) * 30 + (30 + 1) * 2;
    auto net = build_network<float>(2, 1);
    CHECK(net.flat_dim() == 5120);
    CHECK(net.parameter_count() == convs + dense);
    CHECK(vgg_parameter_count(2) == convs + dense);
    CHECK(net.parameter_count() < 2'000'000);
  }

  TEST_CASE("full network gradient check in 64-bit mode") {
    auto net = build_network<double>(3, 11, 16, 16);
    Rng rng(12);
    std::vector<double> x(16 * 16);
    for (double& v : x) v = rng.uniform(0.0, 1.0);
    std::vector<nn::Tensor<double>> inputs{nn::Tensor<double>({1, 16, 16}, x, true)};
    for (auto& p : net.params) inputs.push_back(p);
    nn::GradCheckOptions opts;
    opts.max_coords_per_input = 12;
    opts.seed = 4;
    auto fn = [&](const std::vector<nn::Tensor<double>>& in) {
      VggNet<double> local = net;
      for (size_t i = 0; i < local.params.size(); ++i) local.params[i] = in[i + 1];
      return nn::softmax_cross_entropy(forward(local, in[0]).logits, size_t(1));
    };
    auto r = nn::grad_check<double>(fn, inputs, opts);
    MESSAGE("max relative error " << r.max_rel_error << " over " << r.coords_checked);
    CHECK(r.max_rel_error < 1e-5);
  }

  TEST_CASE("input shape is enforced") {
    auto model = init_generator(3, 1);
    dsp::MelSpectrogram bad{std::vector<float>(100)};
    CHECK_THROWS_AS(embed(model, bad), DimensionError);
  }
}

TEST_SUITE("generator training") {
  TEST_CASE("two separable tones overfit, checkpoint is the best epoch") {
    auto ds = two_tone_dataset(10, 1);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.lr = 1e-3;
    cfg.seed = 5;
    double best_train = 0.0;
    auto result = train_generator(ds, cfg, [&](const EpochLog& e) {
      best_train = std::max(best_train, e.train_accuracy);
      return best_train < 0.99;
    });
    MESSAGE("epochs run " << result.log.size());
    CHECK(best_train >= 0.99);
    for (const auto& e : result.log) CHECK(result.model.val_accuracy >= e.val_accuracy);

    std::vector<Embedding> emb;
    for (const auto& item : ds.items) emb.push_back(embed(result.model, item));
    double intra = 0, inter = 0;
    size_t n_intra = 0, n_inter = 0;
    for (size_t i = 0; i < emb.size(); ++i)
      for (size_t j = i + 1; j < emb.size(); ++j) {
        const double c = cosine(emb[i], emb[j]);
        if (ds.labels[i] == ds.labels[j]) {
          intra += c;
          ++n_intra;
        } else {
          inter += c;
          ++n_inter;
        }
      }
    CHECK(intra / n_intra > inter / n_inter);
  }

  TEST_CASE("seeded training is reproducible") {
    auto ds = two_tone_dataset(4, 2);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 3;
    cfg.lr = 1e-3;
    cfg.seed = 9;
    auto a = train_generator(ds, cfg), b = train_generator(ds, cfg);
    for (size_t p = 0; p < a.model.net.params.size(); ++p) {
      auto x = a.model.net.params[p].data(), y = b.model.net.params[p].data();
      CHECK(std::equal(x.begin(), x.end(), y.begin()));
    }
    CHECK(a.log.size() == b.log.size());
  }

  TEST_CASE("invalid configurations") {
    auto ds = two_tone_dataset(2, 2);
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(train_generator(ds, cfg), UsageError);
    cfg.epochs = 1;
    cfg.lr = -1;
    CHECK_THROWS_AS(train_generator(ds, cfg), UsageError);
    auto one = ds;
    one.items.resize(3);
    one.labels.resize(3);
    CHECK_THROWS_AS(train_generator(one, TrainConfig{}), DataError);
  }
}

TEST_SUITE("embeddings") {
  TEST_CASE("deterministic, 30 finite values") {
    auto model = init_generator(5, 3);
    auto spec = reference_spec();
    auto a = embed(model, spec), b = embed(model, spec);
    CHECK(a == b);
    for (float v : a) CHECK(std::isfinite(v));
  }

  TEST_CASE("predicted class is the argmax of the logits") {
    auto model = init_generator(6, 21);
    auto ds = two_tone_dataset(4, 3);
    for (const auto& item : ds.items) {
      const auto out = forward(model.net, to_input(item));
      const auto logits = out.logits.data();
      const size_t expected =
          size_t(std::max_element(logits.begin(), logits.end()) - logits.begin());
      // Heap churn between calls must not change the answer.
      std::vector<std::vector<float>> churn(8, std::vector<float>(4096, 1e30f));
      CHECK(predict_class(model, item) == expected);
    }
  }

  TEST_CASE("untrained seeded model matches the golden vector") {
    auto model = init_generator(10, 1234);
    auto e = embed(model, reference_spec());
    const fs::path golden = fs::path(AUDIOSEG_TEST_DATA_DIR) / "golden_embedding.tnsr";
    if (std::getenv("AUDIOSEG_UPDATE_GOLDEN")) {
      nn::write_tnsr(golden, {kEmbeddingDim}, std::span<const float>(e));
    }
    REQUIRE(fs::exists(golden));
    auto ref = nn::read_tnsr(golden);
    REQUIRE(ref.values.size() == kEmbeddingDim);
    for (size_t i = 0; i < kEmbeddingDim; ++i)
      CHECK(std::abs(e[i] - ref.values[i]) <= 1e-5 * std::max(1.0, std::abs(ref.values[i])));
  }

  TEST_CASE("checkpoints round-trip") {
    auto model = init_generator(4, 8, TaskTag::kFpc);
    model.val_accuracy = 0.5;
    const fs::path dir = fs::temp_directory_path() / "audioseg_gen_ckpt";
    fs::remove_all(dir);
    save_generator(model, dir);
    auto loaded = load_generator(dir);
    CHECK(loaded.task == TaskTag::kFpc);
    CHECK(loaded.n_classes() == 4);
    CHECK(loaded.val_accuracy == 0.5);
    auto spec = reference_spec();
    CHECK(embed(model, spec) == embed(loaded, spec));
    fs::remove(dir / "hidden.weights.tnsr");
    CHECK_THROWS_AS(load_generator(dir), DataError);
    CHECK_THROWS_AS(load_generator(dir / "missing"), DataError);
    fs::remove_all(dir);
  }
}
