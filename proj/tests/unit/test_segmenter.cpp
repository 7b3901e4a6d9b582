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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "audioseg/corpus/benchmark.hpp"
#include "audioseg/corpus/clips.hpp"
#include "audioseg/error.hpp"
#include "audioseg/generator/dataset.hpp"
#include "audioseg/nn/grad_check.hpp"
#include "audioseg/segmenter/segmenter.hpp"
#include "doctest.h"

using namespace audioseg;
using namespace audioseg::segmenter;
namespace fs = std::filesystem;

namespace {

double cosine(const WordVector& a, const WordVector& b) {
  double ab = 0, aa = 0, bb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += double(a[i]) * b[i];
    aa += double(a[i]) * a[i];
    bb += double(b[i]) * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

corpus::CorpusConfig small_corpus(double show_seconds) {
  corpus::CorpusConfig cfg;
  cfg.n_shows = 6;
  cfg.n_topics = 4;
  cfg.show_seconds = show_seconds;
  cfg.fragment_min_s = 6.0;
  cfg.fragment_max_s = 10.0;
  cfg.words_per_topic = 12;
  cfg.shared_words = 20;
  cfg.seed = 21;
  return cfg;
}

// Shared across tests: a briefly trained sound-event generator and a few
// short audio-informative shows with their SEC features.
struct SecFixture {
  generator::GeneratorModel sec;
  std::vector<corpus::Show> shows;
  std::vector<LabeledSequence> seqs;

  SecFixture() {
    auto clips = corpus::make_sound_event_clips(8, 6, 1.0, 3);
    auto ds = generator::build_sec_dataset(clips);
    ds.task = generator::TaskTag::kSec;
    generator::TrainConfig tc;
    tc.epochs = 4;
    tc.batch_size = 8;
    tc.lr = 1e-3;
    tc.seed = 7;
    sec = generator::train_generator(ds, tc).model;
    const auto cfg = small_corpus(40.0);
    const auto vocab = corpus::make_vocabulary(cfg);
    for (int i = 0; i < 4; ++i) {
      shows.push_back(corpus::synth_show(cfg, vocab, i));
      seqs.push_back(label_sequence(shows.back(), assemble_features(shows.back(), {&sec}, false)));
    }
  }
};

const SecFixture& fixture() {
  static const SecFixture f;
  return f;
}

LabeledSequence random_sequence(size_t rows, size_t cols, uint64_t seed, size_t every = 7) {
  Rng rng(seed);
  LabeledSequence s;
  s.features = {rows, cols, std::vector<float>(rows * cols)};
  for (float& v : s.features.values) v = float(rng.uniform(-1, 1));
  s.labels.assign(rows, 0);
  for (size_t i = every; i < rows; i += every) s.labels[i] = 1;
  return s;
}

}  // namespace

TEST_SUITE("word embeddings") {
  TEST_CASE("deterministic and unit norm") {
    for (const char* w : {"a", "radio", "weather", "zzz", ""}) {
      const auto a = hash_word_vector(w), b = hash_word_vector(w);
      CHECK(a == b);
      double n2 = 0;
      for (float x : a) n2 += double(x) * x;
      CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("distinct words are nearly orthogonal") {
    Rng rng(99);
    int small = 0;
    for (int i = 0; i < 1000; ++i) {
      const std::string a = "w" + std::to_string(rng.next_u64());
      const std::string b = "w" + std::to_string(rng.next_u64());
      small += std::abs(cosine(hash_word_vector(a), hash_word_vector(b))) < 0.5;
    }
    CHECK(small >= 990);
  }

  TEST_CASE("table lookup with hash fallback") {
    std::ostringstream table;
    table << "news\t";
    for (size_t i = 0; i < kWordDim; ++i) table << (i == 0 ? "" : " ") << (i % 3) * 0.5;
    table << "\n\n";
    std::istringstream in(table.str());
    auto e = WordEmbedder::from_table(in);
    CHECK(e.table_size() == 1);
    CHECK(e("news")[0] == 0.0f);
    CHECK(e("news")[2] == 1.0f);
    CHECK(e("sport") == hash_word_vector("sport"));
    CHECK(WordEmbedder{}("news") == hash_word_vector("news"));
  }

  TEST_CASE("malformed table lines") {
    auto parse = [](const std::string& text) {
      std::istringstream in(text);
      return WordEmbedder::from_table(in, "t");
    };
    CHECK_THROWS_AS(parse("word 1 2 3\n"), DataError);
    CHECK_THROWS_AS(parse("word\t1 2 3\n"), DataError);
    std::string ok = "w\t";
    for (size_t i = 0; i < kWordDim; ++i) ok += "1 ";
    CHECK_NOTHROW(parse(ok));
    CHECK_THROWS_AS(parse(ok + "1"), DataError);
    std::string bad = ok;
    bad[2] = 'x';
    CHECK_THROWS_AS(parse(bad), DataError);
    CHECK_THROWS_AS(parse(ok + "\n" + ok), DataError);
    try {
      parse("fine\t" + std::string("1 ") + "\n");
      FAIL("expected an error");
    } catch (const DataError& err) {
      CHECK(std::string(err.what()).find("t:1") != std::string::npos);
    }
  }
}

TEST_SUITE("features") {
  TEST_CASE("config tags and dimensions") {
    CHECK(FeatureConfig::parse("txt").dim() == 300);
    CHECK(FeatureConfig::parse("TXT+SEC").dim() == 330);
    CHECK(FeatureConfig::parse("sec").dim() == 30);
    CHECK(FeatureConfig::parse("all").dim() == 390);
    CHECK(FeatureConfig::parse("txt+sec+fpc+wc").tag() == "ALL");
    CHECK(FeatureConfig::parse("wc+txt").tag() == "TXT+WC");
    for (const char* t : {"TXT", "SEC", "FPC", "TXT+SEC", "TXT+FPC", "TXT+WC", "ALL"}) {
      CHECK(FeatureConfig::parse(t).tag() == t);
    }
    CHECK_THROWS_AS(FeatureConfig::parse("txt+mfcc"), UsageError);
    CHECK_THROWS_AS(FeatureConfig::parse(""), UsageError);
    CHECK_THROWS_AS(FeatureConfig::parse("txt+txt"), UsageError);
  }

  TEST_CASE("block widths, order and repeatability") {
    auto cfg = small_corpus(8.0);
    auto vocab = corpus::make_vocabulary(cfg);
    auto show = corpus::synth_show(cfg, vocab, 0);
    const size_t m = show.tokens.size();
    auto sec = generator::init_generator(3, 1, generator::TaskTag::kSec);
    auto fpc = generator::init_generator(4, 2, generator::TaskTag::kFpc);
    auto wc = generator::init_generator(5, 3, generator::TaskTag::kWc);

    auto txt_sec = assemble_features(show, {&sec}, true);
    CHECK(txt_sec.rows == m);
    CHECK(txt_sec.cols == 330);
    auto sec_only = assemble_features(show, {&sec}, false);
    CHECK(sec_only.cols == 30);
    auto all = assemble_features(show, {&wc, &sec, &fpc}, true, {}, 3);
    CHECK(all.cols == 390);
    CHECK(feature_config_of({&wc, &sec, &fpc}, true).tag() == "ALL");

    // Column blocks sit in the order text, SEC, FPC, WC whatever the input order.
    auto txt = text_block(show, WordEmbedder{});
    auto fpc_block = audio_block(show, fpc);
    auto wc_block = audio_block(show, wc);
    for (size_t i = 0; i < m; ++i) {
      auto r = all.row(i);
      CHECK(std::equal(r.begin(), r.begin() + 300, txt.row(i).begin()));
      CHECK(std::equal(r.begin() + 300, r.begin() + 330, sec_only.row(i).begin()));
      CHECK(std::equal(r.begin() + 330, r.begin() + 360, fpc_block.row(i).begin()));
      CHECK(std::equal(r.begin() + 360, r.end(), wc_block.row(i).begin()));
    }
    CHECK(assemble_features(show, {&sec}, true) == txt_sec);
    CHECK(assemble_features(show, {&fpc, &wc, &sec}, true, {}, 1) == all);

    // Token audio is the token's own samples padded to one second.
    const auto& t = show.tokens[m / 2];
    auto direct = dsp::mel_spectrogram(
        dsp::fit_to_one_second(dsp::Waveform{std::vector<float>(show.audio.samples.begin() + t.start,
                                                                show.audio.samples.begin() + t.end)}));
    auto e = generator::embed(sec, direct);
    CHECK(std::equal(e.begin(), e.end(), sec_only.row(m / 2).begin()));
  }

  TEST_CASE("invalid requests") {
    auto cfg = small_corpus(8.0);
    auto vocab = corpus::make_vocabulary(cfg);
    auto show = corpus::synth_show(cfg, vocab, 0);
    auto sec = generator::init_generator(3, 1, generator::TaskTag::kSec);
    auto sec2 = generator::init_generator(3, 2, generator::TaskTag::kSec);
    auto custom = generator::init_generator(3, 2);
    CHECK_THROWS_AS(assemble_features(show, {}, false), UsageError);
    CHECK_THROWS_AS(assemble_features(show, {&sec, &sec2}, true), UsageError);
    CHECK_THROWS_AS(assemble_features(show, {&custom}, true), UsageError);
    auto truncated = show;
    truncated.audio.samples.resize(truncated.tokens.back().start);
    CHECK_THROWS_AS(assemble_features(truncated, {&sec}, true), DataError);
    CHECK_NOTHROW(assemble_features(truncated, {}, true));
  }
}

TEST_SUITE("segmenter model") {
  TEST_CASE("tagger plus weighted BCE gradient check in 64-bit mode") {
    Rng rng(5);
    const size_t d = 6, u = 4, steps = 5;
    auto lstm = nn::init_lstm<double>(d, u, rng);
    auto w = nn::kaiming_uniform<double>({1, u}, u, rng);
    auto b = nn::Tensor<double>({1}, {0.1}, true);
    std::vector<double> x(steps * d);
    for (double& v : x) v = rng.uniform(-1, 1);
    const std::vector<double> y{0, 0, 1, 0, 1};
    std::vector<nn::Tensor<double>> inputs{lstm.input_weights, lstm.recurrent_weights, lstm.bias,
                                           w, b};
    auto fn = [&](const std::vector<nn::Tensor<double>>& in) {
      nn::LstmParams<double> p{in[0], in[1], in[2]};
      auto state = nn::lstm_zero_state<double>(u);
      auto z = tagger_logits<double>(p, in[3], in[4], x, steps, state);
      return nn::bce_with_logits<double>(z, y, 1.5);
    };
    // Some recurrent-weight gradients are ~1e-6; a 2e-5 step keeps the
    // central-difference roundoff well below the tolerance for them.
    nn::GradCheckOptions opts;
    opts.step = 2e-5;
    auto r = nn::grad_check<double>(fn, inputs, opts);
    MESSAGE("max relative error " << r.max_rel_error << " over " << r.coords_checked << " worst "
                                  << r.worst_input << ":" << r.worst_index << " "
                                  << r.worst_analytic << " vs " << r.worst_numeric);
    CHECK(r.coords_checked == 4 * u * d + 4 * u * u + 4 * u + u + 1);
    CHECK(r.max_rel_error < 1e-5);
  }

  TEST_CASE("zero model predicts 0.5 everywhere") {
    auto model = zero_segmenter(FeatureConfig::parse("txt"), 8);
    model.tau = 0.5;
    auto seq = random_sequence(9, 300, 1);
    auto p = predict(model, seq.features);
    for (double v : p.probs) CHECK(v == 0.5);
    CHECK(p.boundaries[0] == 0);
    for (size_t i = 1; i < 9; ++i) CHECK(p.boundaries[i] == 1);
  }

  TEST_CASE("threshold must lie strictly inside (0, 1)") {
    const std::vector<double> probs{0.2, 0.9};
    CHECK_THROWS_AS(apply_threshold(probs, 1.0), UsageError);
    CHECK_THROWS_AS(apply_threshold(probs, 0.0), UsageError);
    CHECK(apply_threshold(probs, 0.9) == eval::Boundaries{0, 1});
    auto model = zero_segmenter(FeatureConfig::parse("sec"), 2);
    model.tau = 1.0;
    CHECK_THROWS_AS(predict(model, random_sequence(3, 30, 1).features), UsageError);
  }

  TEST_CASE("prediction preserves length") {
    auto model = init_segmenter(FeatureConfig::parse("sec"), 5, 3);
    for (size_t m : {1, 2, 7, 64, 300}) {
      auto p = predict(model, random_sequence(m, 30, m).features);
      CHECK(p.probs.size() == m);
      CHECK(p.boundaries.size() == m);
      CHECK(p.boundaries[0] == 0);
      for (double v : p.probs) CHECK((v > 0 && v < 1));
    }
  }

  TEST_CASE("feature width must match") {
    auto model = init_segmenter(FeatureConfig::parse("txt+sec"), 4, 1);
    CHECK(model.input_dim() == 330);
    CHECK_THROWS_AS(predict(model, random_sequence(4, 300, 1).features), DimensionError);
  }

  TEST_CASE("positive weight") {
    std::vector<LabeledSequence> data(1);
    data[0].labels = {0, 1, 0, 1};
    CHECK(positive_weight(data) == 1.0);
    data.push_back(random_sequence(50, 1, 1, 10));  // 4 boundaries in 50
    CHECK(positive_weight(data) == doctest::Approx((2.0 + 46.0) / (2.0 + 4.0)));
    data[0].labels = {0, 0};
    data.resize(1);
    CHECK_THROWS_AS(positive_weight(data), DataError);
  }

  TEST_CASE("labels are consumed as the corpus writes them") {
    auto cfg = small_corpus(30.0);
    auto vocab = corpus::make_vocabulary(cfg);
    auto show = corpus::synth_show(cfg, vocab, 2);
    const fs::path dir = fs::temp_directory_path() / "audioseg_seg_labels";
    fs::remove_all(dir);
    corpus::write_show(show, "s", cfg.seed, cfg.hash(), dir);
    auto loaded = corpus::load_show(dir);
    auto seq = label_sequence(loaded, text_block(loaded, WordEmbedder{}));
    eval::Boundaries expected(loaded.tokens.size(), 0);
    for (size_t f = 1; f < show.fragments.size(); ++f) expected[show.fragments[f].first_token] = 1;
    CHECK(seq.labels == expected);
    CHECK(seq.labels[0] == 0);
    fs::remove_all(dir);
    auto short_features = text_block(loaded, WordEmbedder{});
    short_features.rows -= 1;
    CHECK_THROWS_AS(label_sequence(loaded, short_features), DimensionError);
  }
}

TEST_SUITE("segmenter training") {
  TEST_CASE("overfits one cued show with SEC features") {
    const auto& fx = fixture();
    std::span<const LabeledSequence> one(fx.seqs.data(), 1);
    SegTrainConfig cfg;
    cfg.epochs = 80;
    cfg.thresholds = {0.5};
    cfg.seed = 3;
    auto fit = fit_segmenter(one, {}, FeatureConfig::parse("sec"), 32, 1e-2, cfg);
    for (size_t e = 1; e < 10; ++e) CHECK(fit.log[e].loss <= 1.05 * fit.log[e - 1].loss);
    auto p = predict(fit.model, one[0].features);
    const double last_f1 = eval::winpr(one[0].labels, p.boundaries, 10).f1;
    MESSAGE("overfit F1 " << last_f1 << ", loss " << fit.log.front().loss << " -> "
                          << fit.log.back().loss);
    CHECK(last_f1 >= 0.95);
  }

  TEST_CASE("held-out show beats the all-zeros predictor") {
    const auto& fx = fixture();
    std::span<const LabeledSequence> train(fx.seqs.data(), 2);
    std::span<const LabeledSequence> val(fx.seqs.data() + 2, 1);
    SegTrainConfig cfg;
    cfg.units = {32};
    cfg.learning_rates = {1e-2};
    cfg.epochs = 30;
    cfg.seed = 4;
    auto result = train_segmenter(train, val, FeatureConfig::parse("sec"), cfg);
    const auto& test = fx.seqs[3];
    auto p = predict(result.model, test.features);
    const double f1 = eval::winpr(test.labels, p.boundaries, 10).f1;
    const eval::Boundaries zeros(test.labels.size(), 0);
    const double zero_f1 = eval::winpr(test.labels, zeros, 10).f1;
    MESSAGE("held-out F1 " << f1 << " vs all-zeros " << zero_f1);
    CHECK(f1 > zero_f1);
  }

  TEST_CASE("seeded grid search is reproducible and thread-count independent") {
    std::vector<LabeledSequence> train{random_sequence(40, 30, 1, 9), random_sequence(30, 30, 2, 8)};
    std::vector<LabeledSequence> val{random_sequence(35, 30, 3, 9)};
    SegTrainConfig cfg;
    cfg.units = {3, 5};
    cfg.learning_rates = {1e-2, 1e-3};
    cfg.thresholds = {0.3, 0.5};
    cfg.epochs = 4;
    cfg.bptt_window = 16;
    cfg.seed = 8;
    const auto features = FeatureConfig::parse("sec");
    auto a = train_segmenter(train, val, features, cfg);
    cfg.threads = 3;
    auto b = train_segmenter(train, val, features, cfg);
    CHECK(a.grid.size() == 8);
    REQUIRE(a.grid.size() == b.grid.size());
    for (size_t i = 0; i < a.grid.size(); ++i) {
      CHECK(a.grid[i].units == b.grid[i].units);
      CHECK(a.grid[i].val_f1 == b.grid[i].val_f1);
      CHECK(a.grid[i].best_epoch == b.grid[i].best_epoch);
    }
    CHECK(a.model.units() == b.model.units());
    CHECK(a.model.tau == b.model.tau);
    CHECK(a.model.lr == b.model.lr);
    auto pa = a.model.parameters(), pb = b.model.parameters();
    for (size_t i = 0; i < pa.size(); ++i) {
      CHECK(std::equal(pa[i].data().begin(), pa[i].data().end(), pb[i].data().begin()));
    }
    // The selected point has the highest validation F1 in the grid.
    for (const auto& g : a.grid) CHECK(g.val_f1 <= a.model.val_f1);
  }

  TEST_CASE("a one-point grid is plain training") {
    std::vector<LabeledSequence> train{random_sequence(40, 30, 1, 9)};
    std::vector<LabeledSequence> val{random_sequence(35, 30, 3, 9)};
    SegTrainConfig cfg;
    cfg.units = {4};
    cfg.learning_rates = {1e-3};
    cfg.thresholds = {0.5};
    cfg.epochs = 3;
    cfg.seed = 2;
    const auto features = FeatureConfig::parse("sec");
    auto grid = train_segmenter(train, val, features, cfg);
    auto plain = fit_segmenter(train, val, features, 4, 1e-3, cfg);
    CHECK(grid.grid.size() == 1);
    auto pa = grid.model.parameters(), pb = plain.model.parameters();
    for (size_t i = 0; i < pa.size(); ++i) {
      CHECK(std::equal(pa[i].data().begin(), pa[i].data().end(), pb[i].data().begin()));
    }
    CHECK(grid.log.size() == plain.log.size());
  }

  TEST_CASE("training errors") {
    const auto features = FeatureConfig::parse("sec");
    std::vector<LabeledSequence> no_boundaries{random_sequence(10, 30, 1, 100)};
    std::vector<LabeledSequence> val{random_sequence(10, 30, 2, 4)};
    SegTrainConfig cfg;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train_segmenter(no_boundaries, val, features, cfg), DataError);
    std::vector<LabeledSequence> ok{random_sequence(10, 30, 1, 4)};
    CHECK_THROWS_AS(train_segmenter(ok, {}, features, cfg), UsageError);
    CHECK_THROWS_AS(train_segmenter({}, val, features, cfg), UsageError);
    std::vector<LabeledSequence> wide{random_sequence(10, 31, 1, 4)};
    CHECK_THROWS_AS(fit_segmenter(wide, {}, features, 2, 1e-3, cfg), DimensionError);
    cfg.thresholds = {0.5, 1.0};
    CHECK_THROWS_AS(train_segmenter(ok, val, features, cfg), UsageError);
    cfg.thresholds = {0.5};
    cfg.learning_rates = {1e38};
    cfg.epochs = 3;
    CHECK_THROWS_AS(fit_segmenter(ok, {}, features, 2, 1e38, cfg), NumericError);
  }

  TEST_CASE("checkpoints round-trip") {
    std::vector<LabeledSequence> train{random_sequence(40, 330, 1, 9)};
    std::vector<LabeledSequence> val{random_sequence(35, 330, 3, 9)};
    SegTrainConfig cfg;
    cfg.units = {6};
    cfg.learning_rates = {1e-3};
    cfg.epochs = 2;
    cfg.seed = 12;
    auto model = train_segmenter(train, val, FeatureConfig::parse("txt+sec"), cfg).model;
    const fs::path dir = fs::temp_directory_path() / "audioseg_seg_ckpt";
    fs::remove_all(dir);
    save_segmenter(model, dir);
    auto loaded = load_segmenter(dir);
    CHECK(loaded.features.tag() == "TXT+SEC");
    CHECK(loaded.units() == 6);
    CHECK(loaded.tau == model.tau);
    CHECK(loaded.seed == 12);
    CHECK(loaded.val_f1 == model.val_f1);
    CHECK(predict(loaded, val[0].features).probs == predict(model, val[0].features).probs);
    fs::remove(dir / "output.bias.tnsr");
    CHECK_THROWS_AS(load_segmenter(dir), DataError);
    fs::remove_all(dir);
    CHECK_THROWS_AS(load_segmenter(dir), DataError);
  }
}
