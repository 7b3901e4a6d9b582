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

#include "audioseg/segmenter/features.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

#include "audioseg/error.hpp"

namespace audioseg::segmenter {

using generator::TaskTag;

std::string FeatureConfig::tag() const {
  if (text && sec && fpc && wc) return "ALL";
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(text, "TXT");
  add(sec, "SEC");
  add(fpc, "FPC");
  add(wc, "WC");
  return out.empty() ? "NONE" : out;
}

size_t FeatureConfig::dim() const {
  return (text ? kWordDim : 0) + generator::kEmbeddingDim * audio_blocks();
}

std::vector<TaskTag> FeatureConfig::audio_tasks() const {
  std::vector<TaskTag> out;
  if (sec) out.push_back(TaskTag::kSec);
  if (fpc) out.push_back(TaskTag::kFpc);
  if (wc) out.push_back(TaskTag::kWc);
  return out;
}

FeatureConfig FeatureConfig::parse(std::string_view tag) {
  std::string s(tag);
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  FeatureConfig cfg;
  if (s == "ALL") return {true, true, true, true};
  size_t pos = 0;
  while (pos <= s.size()) {
    const size_t plus = std::min(s.find('+', pos), s.size());
    const std::string part = s.substr(pos, plus - pos);
    bool* slot = part == "TXT"   ? &cfg.text
                 : part == "SEC" ? &cfg.sec
                 : part == "FPC" ? &cfg.fpc
                 : part == "WC"  ? &cfg.wc
                                 : nullptr;
    if (slot == nullptr) {
      throw UsageError("unknown feature block '" + part + "' in '" + std::string(tag) +
                       "' (expected TXT, SEC, FPC, WC joined by '+', or ALL)");
    }
    if (*slot) throw UsageError("feature block " + part + " repeated in '" + std::string(tag) + "'");
    *slot = true;
    pos = plus + 1;
  }
  return cfg;
}

FeatureMatrix text_block(const corpus::Show& show, const WordEmbedder& words) {
  FeatureMatrix m{show.tokens.size(), kWordDim, {}};
  m.values.resize(m.rows * m.cols);
  for (size_t i = 0; i < m.rows; ++i) {
    const WordVector v = words(show.tokens[i].word);
    std::copy(v.begin(), v.end(), m.values.begin() + i * kWordDim);
  }
  return m;
}

dsp::MelSpectrogram token_spectrogram(const corpus::Show& show, size_t token) {
  const corpus::WordToken& t = show.tokens.at(token);
  if (show.audio.sample_rate != dsp::kTargetRate) {
    throw DataError("show audio is at " + std::to_string(show.audio.sample_rate) +
                    " Hz, expected 44100");
  }
  if (t.end <= t.start || t.end > show.audio.samples.size()) {
    throw DataError("audio of token " + std::to_string(token) + " ('" + t.word +
                    "', samples " + std::to_string(t.start) + ".." + std::to_string(t.end) +
                    ") is missing from the show audio (" +
                    std::to_string(show.audio.samples.size()) + " samples)");
  }
  return dsp::mel_spectrogram(
      dsp::fit_to_one_second(dsp::slice_samples(show.audio, t.start, t.end)));
}

FeatureMatrix audio_block(const corpus::Show& show, const generator::GeneratorModel& model,
                          size_t threads) {
  const size_t m = show.tokens.size();
  FeatureMatrix out{m, generator::kEmbeddingDim, {}};
  out.values.resize(m * out.cols);
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const generator::Embedding e = generator::embed(model, token_spectrogram(show, i));
      std::copy(e.begin(), e.end(), out.values.begin() + i * out.cols);
    }
  };
  threads = std::clamp<size_t>(threads, 1, std::max<size_t>(m, 1));
  if (threads == 1) {
    work(0, m);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(m * w / threads, m * (w + 1) / threads);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

FeatureMatrix concat_blocks(std::span<const FeatureMatrix* const> blocks) {
  if (blocks.empty()) throw UsageError("concat_blocks: no blocks");
  FeatureMatrix out{blocks[0]->rows, 0, {}};
  for (const FeatureMatrix* b : blocks) {
    if (b->rows != out.rows) {
      throw DimensionError("concat_blocks: " + std::to_string(b->rows) + " rows vs " +
                           std::to_string(out.rows));
    }
    out.cols += b->cols;
  }
  out.values.resize(out.rows * out.cols);
  for (size_t i = 0; i < out.rows; ++i) {
    float* dst = out.values.data() + i * out.cols;
    for (const FeatureMatrix* b : blocks) {
      auto r = b->row(i);
      dst = std::copy(r.begin(), r.end(), dst);
    }
  }
  return out;
}

namespace {

// Generators sorted into block order; rejects duplicates and custom tasks.
std::vector<const generator::GeneratorModel*> ordered_generators(
    const std::vector<const generator::GeneratorModel*>& generators) {
  std::vector<const generator::GeneratorModel*> slots(3, nullptr);
  for (const auto* g : generators) {
    if (g == nullptr) throw UsageError("assemble_features: null generator");
    if (g->task == TaskTag::kCustom) {
      throw UsageError("assemble_features: generator has no SEC/FPC/WC task tag");
    }
    auto& slot = slots[static_cast<size_t>(g->task)];
    if (slot != nullptr) {
      throw UsageError("assemble_features: two generators for task " + generator::task_name(g->task));
    }
    slot = g;
  }
  std::erase(slots, nullptr);
  return slots;
}

}  // namespace

FeatureConfig feature_config_of(const std::vector<const generator::GeneratorModel*>& generators,
                                bool use_text) {
  FeatureConfig cfg;
  cfg.text = use_text;
  for (const auto* g : ordered_generators(generators)) {
    switch (g->task) {
      case TaskTag::kSec: cfg.sec = true; break;
      case TaskTag::kFpc: cfg.fpc = true; break;
      case TaskTag::kWc: cfg.wc = true; break;
      case TaskTag::kCustom: break;
    }
  }
  return cfg;
}

FeatureMatrix assemble_features(const corpus::Show& show,
                                const std::vector<const generator::GeneratorModel*>& generators,
                                bool use_text, const WordEmbedder& words, size_t threads) {
  const auto ordered = ordered_generators(generators);
  if (!use_text && ordered.empty()) {
    throw UsageError("assemble_features: neither text nor audio features requested");
  }
  std::vector<FeatureMatrix> blocks;
  if (use_text) blocks.push_back(text_block(show, words));
  for (const auto* g : ordered) blocks.push_back(audio_block(show, *g, threads));
  std::vector<const FeatureMatrix*> ptrs;
  for (const auto& b : blocks) ptrs.push_back(&b);
  return concat_blocks(ptrs);
}

}  // namespace audioseg::segmenter
