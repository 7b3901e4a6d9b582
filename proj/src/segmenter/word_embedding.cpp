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

#include "audioseg/segmenter/word_embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "audioseg/error.hpp"
#include "audioseg/random.hpp"

namespace audioseg::segmenter {

WordVector hash_word_vector(const std::string& word) {
  Rng rng(fnv1a64(word));
  std::array<double, kWordDim> v;
  double norm2 = 0.0;
  for (double& x : v) {
    x = 2.0 * rng.uniform() - 1.0;
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  WordVector out;
  for (size_t i = 0; i < kWordDim; ++i) out[i] = static_cast<float>(v[i] * inv);
  return out;
}

WordEmbedder WordEmbedder::from_table(std::istream& in, const std::string& source) {
  WordEmbedder e;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + why);
    };
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) fail("expected word<TAB>values");
    std::string word = line.substr(0, tab);
    WordVector v;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    size_t n = 0;
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      if (n == kWordDim) fail("more than " + std::to_string(kWordDim) + " values");
      float x;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t')) {
        fail("bad number in column " + std::to_string(n + 1));
      }
      if (!std::isfinite(x)) fail("non-finite value in column " + std::to_string(n + 1));
      v[n++] = x;
      p = next;
    }
    if (n != kWordDim) {
      fail("expected " + std::to_string(kWordDim) + " values, got " + std::to_string(n));
    }
    if (!e.table_.emplace(std::move(word), v).second) fail("duplicate word");
  }
  return e;
}

WordEmbedder WordEmbedder::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word table " + path.string());
  return from_table(in, path.string());
}

WordVector WordEmbedder::operator()(const std::string& word) const {
  auto it = table_.find(word);
  return it != table_.end() ? it->second : hash_word_vector(word);
}

}  // namespace audioseg::segmenter
