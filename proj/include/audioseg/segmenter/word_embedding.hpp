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

// Word vectors for the text feature block.
//
// By default each word maps to a pseudo-random unit vector seeded by the
// FNV-1a hash of its bytes. Components are uniform on [-1, 1) and the only
// floating-point operations are products, sums and one sqrt, so the vectors
// are bit-identical across IEEE-754 platforms. An external table, one line
// per word ("word<TAB>v1 v2 ... v300"), can override the hash vectors.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <unordered_map>

namespace audioseg::segmenter {

inline constexpr size_t kWordDim = 300;

using WordVector = std::array<float, kWordDim>;

WordVector hash_word_vector(const std::string& word);

class WordEmbedder {
 public:
  WordEmbedder() = default;

  // Throws DataError naming the offending line.
  static WordEmbedder from_table(std::istream& in, const std::string& source = "table");
  static WordEmbedder from_file(const std::filesystem::path& path);

  // Table entry when present, otherwise the hash vector.
  WordVector operator()(const std::string& word) const;

  size_t table_size() const { return table_.size(); }
  bool contains(const std::string& word) const { return table_.count(word) != 0; }

 private:
  std::unordered_map<std::string, WordVector> table_;
};

}  // namespace audioseg::segmenter
