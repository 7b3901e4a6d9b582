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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace audioseg::eval {

using Boundaries = std::vector<uint8_t>;

struct WinPRResult {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t k = 0;
};

// Windowed precision/recall. Windows of k positions start at every
// i in [1-k, N-1] and are clipped to the sequence, so each position is
// covered by exactly k windows. If neither sequence has a boundary the
// result is (1,1,1); if exactly one of them is empty it is (0,0,0).
WinPRResult winpr(std::span<const uint8_t> reference,
                  std::span<const uint8_t> hypothesis, size_t k);

// Brute-force reference: builds every window as an explicit index set.
// Intended for short sequences (N <= 200).
WinPRResult winpr_oracle(std::span<const uint8_t> reference,
                         std::span<const uint8_t> hypothesis, size_t k);

struct CorpusEvaluation {
  std::vector<WinPRResult> per_show;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-show WinPR plus the unweighted mean of P, R and F1 over shows.
CorpusEvaluation evaluate_corpus(const std::vector<Boundaries>& predictions,
                                 const std::vector<Boundaries>& references,
                                 size_t k = 10);

// Relative change in percent: 100 * (method - baseline) / baseline.
double improvement(double baseline_f1, double method_f1);

}  // namespace audioseg::eval
