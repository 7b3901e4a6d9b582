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

#include "audioseg/pipeline/stages.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "audioseg/corpus/benchmark.hpp"
#include "audioseg/dsp/resample.hpp"
#include "audioseg/dsp/wav.hpp"
#include "audioseg/error.hpp"
#include "audioseg/eval/winpr.hpp"
#include "audioseg/nn/tnsr.hpp"
#include "audioseg/pipeline/bundle.hpp"

namespace audioseg::pipeline {
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> files_with_extension(const fs::path& root, const std::string& ext) {
  if (!fs::is_directory(root)) throw DataError("not a directory: " + root.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path output_for(const fs::path& file, const fs::path& in, const fs::path& out) {
  fs::path rel = fs::relative(file, in);
  rel.replace_extension(".tnsr");
  return out / rel;
}

std::vector<float> stack(const std::vector<dsp::MelSpectrogram>& specs) {
  std::vector<float> values;
  values.reserve(specs.size() * dsp::kMelBands * dsp::kMelFrames);
  for (const auto& s : specs) values.insert(values.end(), s.values.begin(), s.values.end());
  return values;
}

std::vector<dsp::MelSpectrogram> read_stack(const fs::path& file) {
  const auto d = nn::read_tnsr(file);
  if (d.shape.size() != 3 || d.shape[1] != dsp::kMelBands || d.shape[2] != dsp::kMelFrames) {
    throw DataError(file.string() + ": expected a [n, 128, 87] spectrogram stack");
  }
  std::vector<dsp::MelSpectrogram> out(d.shape[0]);
  const size_t per = dsp::kMelBands * dsp::kMelFrames;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].values.assign(d.values.begin() + ptrdiff_t(i * per),
                         d.values.begin() + ptrdiff_t((i + 1) * per));
  }
  return out;
}

}  // namespace

std::vector<dsp::MelSpectrogram> clip_spectrograms(const dsp::Waveform& w, ClipMode mode) {
  const auto at_rate = w.sample_rate == dsp::kTargetRate ? w : dsp::resample_to_44100(w);
  std::vector<dsp::MelSpectrogram> out;
  if (mode == ClipMode::kFit) {
    out.push_back(dsp::mel_spectrogram(dsp::fit_to_one_second(at_rate)));
  } else {
    for (const auto& c : dsp::chunk_clip(at_rate)) out.push_back(dsp::mel_spectrogram(c));
  }
  return out;
}

size_t preprocess_dir(const fs::path& in, const fs::path& out, ClipMode mode) {
  const auto files = files_with_extension(in, ".wav");
  for (const auto& f : files) {
    std::vector<dsp::MelSpectrogram> specs;
    try {
      specs = clip_spectrograms(dsp::load_wav(f), mode);
    } catch (const DataError& e) {
      throw DataError(f.string() + ": " + e.what());
    }
    const auto target = output_for(f, in, out);
    fs::create_directories(target.parent_path());
    nn::write_tnsr(target, {specs.size(), dsp::kMelBands, dsp::kMelFrames},
                   std::span<const float>(stack(specs)));
  }
  return files.size();
}

size_t embed_dir(const generator::GeneratorModel& model, const fs::path& in, const fs::path& out,
                 size_t threads) {
  auto files = files_with_extension(in, ".tnsr");
  const auto wavs = files_with_extension(in, ".wav");
  files.insert(files.end(), wavs.begin(), wavs.end());
  std::sort(files.begin(), files.end());
  std::map<fs::path, fs::path> targets;
  for (const auto& f : files) {
    auto [it, fresh] = targets.emplace(output_for(f, in, out), f);
    if (!fresh) {
      throw UsageError("embed: " + it->second.string() + " and " + f.string() +
                       " would write the same output");
    }
  }
  threads = std::max<size_t>(1, threads);
  for (const auto& [target, f] : targets) {
    const auto specs = f.extension() == ".wav" ? clip_spectrograms(dsp::load_wav(f), ClipMode::kChunk)
                                               : read_stack(f);
    std::vector<float> values(specs.size() * generator::kEmbeddingDim);
    auto work = [&](size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        const auto e = generator::embed(model, specs[i]);
        std::copy(e.begin(), e.end(), values.begin() + ptrdiff_t(i * generator::kEmbeddingDim));
      }
    };
    std::vector<std::thread> pool;
    const size_t per = (specs.size() + threads - 1) / threads;
    for (size_t t = 1; t < threads && t * per < specs.size(); ++t) {
      pool.emplace_back(work, t * per, std::min(specs.size(), (t + 1) * per));
    }
    work(0, std::min(specs.size(), per));
    for (auto& th : pool) th.join();
    fs::create_directories(target.parent_path());
    nn::write_tnsr(target, {specs.size(), generator::kEmbeddingDim}, std::span<const float>(values));
  }
  return files.size();
}

std::vector<fs::path> expand_prediction_paths(const std::vector<fs::path>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      const auto found = files_with_extension(p, ".jsonl");
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

ResultsTable evaluate_predictions(const std::vector<fs::path>& predictions,
                                  const fs::path& corpus_dir, size_t k, const std::string& method,
                                  std::optional<uint64_t> seed) {
  if (predictions.empty()) throw UsageError("eval: no prediction files");
  if (method.empty() || method == kMacroRow) throw UsageError("eval: invalid method name");
  const auto manifest = corpus::load_manifest(corpus_dir);
  std::map<std::string, fs::path> show_dirs;
  for (const auto& e : manifest.shows) show_dirs[e.id] = e.dir;

  std::vector<eval::Boundaries> preds, refs;
  std::vector<std::string> ids;
  for (const auto& p : predictions) {
    const std::string id = p.stem().string();
    auto it = show_dirs.find(id);
    if (it == show_dirs.end()) {
      throw DataError(p.string() + ": no show '" + id + "' in " + corpus_dir.string());
    }
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
      throw UsageError("eval: show " + id + " predicted twice");
    }
    auto hyp = read_predictions(p);
    auto ref = corpus::load_show(it->second).labels;
    if (hyp.size() != ref.size()) {
      throw DataError(p.string() + ": " + std::to_string(hyp.size()) + " predictions for " +
                      std::to_string(ref.size()) + " tokens");
    }
    preds.push_back(std::move(hyp));
    refs.push_back(std::move(ref));
    ids.push_back(id);
  }
  const auto ev = eval::evaluate_corpus(preds, refs, k);
  ResultsTable t;
  t.seed = seed.value_or(manifest.seed);
  t.config_hash = manifest.config_hash;
  for (size_t i = 0; i < ids.size(); ++i) {
    const auto& r = ev.per_show[i];
    t.rows.push_back({ids[i], method, r.precision, r.recall, r.f1});
  }
  t.rows.push_back({std::string(kMacroRow), method, ev.precision, ev.recall, ev.f1});
  t.validate();
  return t;
}

}  // namespace audioseg::pipeline
