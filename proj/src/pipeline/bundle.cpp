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

#include "audioseg/pipeline/bundle.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "audioseg/error.hpp"

namespace audioseg::pipeline {
namespace fs = std::filesystem;
using json = nlohmann::json;
using generator::TaskTag;

namespace {

constexpr const char* kBundleFile = "bundle.json";
constexpr const char* kTableFile = "word_vectors.tsv";

fs::path generator_dir(const fs::path& dir, TaskTag task) {
  return dir / ("generator-" + generator::task_name(task));
}

}  // namespace

segmenter::FeatureMatrix SegmenterBundle::features(const corpus::Show& show, size_t threads) const {
  std::vector<const generator::GeneratorModel*> gens;
  for (TaskTag t : model.features.audio_tasks()) {
    auto it = generators.find(t);
    if (it == generators.end()) {
      throw DataError("bundle has no " + generator::task_name(t) + " generator");
    }
    gens.push_back(&it->second);
  }
  return segmenter::assemble_features(show, gens, model.features.text, words, threads);
}

segmenter::Prediction SegmenterBundle::predict(const corpus::Show& show, size_t threads) const {
  return segmenter::predict(model, features(show, threads));
}

void save_bundle(const fs::path& dir, const segmenter::SegmenterModel& model,
                 const fs::path& word_table,
                 const std::map<TaskTag, const generator::GeneratorModel*>& generators) {
  segmenter::save_segmenter(model, dir);
  json tasks = json::array();
  for (TaskTag t : model.features.audio_tasks()) {
    auto it = generators.find(t);
    if (it == generators.end() || !it->second) {
      throw UsageError("save_bundle: the " + model.features.tag() + " model needs a " +
                       generator::task_name(t) + " generator");
    }
    generator::save_generator(*it->second, generator_dir(dir, t));
    tasks.push_back(generator::task_name(t));
  }
  const bool table = model.features.text && !word_table.empty();
  if (table) fs::copy_file(word_table, dir / kTableFile, fs::copy_options::overwrite_existing);
  const json meta = {{"format", "audioseg-bundle"},
                     {"words", model.features.text ? (table ? "table" : "hash") : "none"},
                     {"generators", tasks}};
  std::ofstream out(dir / kBundleFile, std::ios::binary | std::ios::trunc);
  out << meta.dump(2) << "\n";
  if (!out) throw DataError("cannot write " + (dir / kBundleFile).string());
}

SegmenterBundle load_bundle(const fs::path& dir) {
  std::ifstream in(dir / kBundleFile, std::ios::binary);
  if (!in) throw DataError(dir.string() + " is not a segmenter bundle (no bundle.json)");
  json meta;
  try {
    meta = json::parse(in);
    if (meta.at("format") != "audioseg-bundle") throw DataError("unknown bundle format");
  } catch (const json::exception& e) {
    throw DataError((dir / kBundleFile).string() + ": " + e.what());
  }
  SegmenterBundle b;
  b.model = segmenter::load_segmenter(dir);
  if (meta.value("words", std::string()) == "table") {
    b.words = segmenter::WordEmbedder::from_file(dir / kTableFile);
  }
  for (TaskTag t : b.model.features.audio_tasks()) {
    auto g = generator::load_generator(generator_dir(dir, t));
    if (g.task != t) throw DataError("bundle generator-" + generator::task_name(t) + " has the wrong task");
    b.generators.emplace(t, std::move(g));
  }
  return b;
}

std::string predictions_jsonl(const segmenter::Prediction& p) {
  std::string out;
  for (size_t i = 0; i < p.probs.size(); ++i) {
    out += json({{"index", i}, {"prob", p.probs[i]}, {"boundary", int(p.boundaries[i])}}).dump();
    out += "\n";
  }
  return out;
}

eval::Boundaries read_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  eval::Boundaries out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const json j = json::parse(line);
      if (j.at("index").get<size_t>() != out.size()) throw DataError(where + "index out of sequence");
      const int b = j.at("boundary").get<int>();
      if (b != 0 && b != 1) throw DataError(where + "boundary must be 0 or 1");
      out.push_back(uint8_t(b));
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    }
  }
  if (out.empty()) throw DataError(path.string() + ": no predictions");
  return out;
}

}  // namespace audioseg::pipeline
