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

#include "audioseg/eval/winpr.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "audioseg/error.hpp"

namespace audioseg::eval {
namespace {

void validate(std::span<const uint8_t> reference,
              std::span<const uint8_t> hypothesis, size_t k) {
  if (reference.size() != hypothesis.size()) {
    throw DimensionError("winpr: reference has " +
                         std::to_string(reference.size()) +
                         " positions, hypothesis has " +
                         std::to_string(hypothesis.size()));
  }
  if (k < 1) throw UsageError("winpr: window size must be at least 1");
}

WinPRResult finish(double tp, double fp, double fn, size_t k, bool ref_empty,
                   bool hyp_empty) {
  WinPRResult r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.k = k;
  if (ref_empty && hyp_empty) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  if (ref_empty || hyp_empty) return r;
  r.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  r.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  return r;
}

bool none_set(std::span<const uint8_t> v) {
  return std::none_of(v.begin(), v.end(), [](uint8_t b) { return b != 0; });
}

}  // namespace

WinPRResult winpr(std::span<const uint8_t> reference,
                  std::span<const uint8_t> hypothesis, size_t k) {
  validate(reference, hypothesis, k);
  const auto n = static_cast<std::ptrdiff_t>(reference.size());
  const auto kk = static_cast<std::ptrdiff_t>(k);
  std::vector<int64_t> ref_prefix(n + 1, 0), hyp_prefix(n + 1, 0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    ref_prefix[i + 1] = ref_prefix[i] + (reference[i] != 0);
    hyp_prefix[i + 1] = hyp_prefix[i] + (hypothesis[i] != 0);
  }
  int64_t tp = 0, fp = 0, fn = 0;
  for (std::ptrdiff_t start = 1 - kk; start <= n - 1; ++start) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(start, 0);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(start + kk, n);
    const int64_t r = ref_prefix[hi] - ref_prefix[lo];
    const int64_t c = hyp_prefix[hi] - hyp_prefix[lo];
    tp += std::min(r, c);
    fp += std::max<int64_t>(0, c - r);
    fn += std::max<int64_t>(0, r - c);
  }
  return finish(double(tp), double(fp), double(fn), k, ref_prefix[n] == 0,
                hyp_prefix[n] == 0);
}

WinPRResult winpr_oracle(std::span<const uint8_t> reference,
                         std::span<const uint8_t> hypothesis, size_t k) {
  validate(reference, hypothesis, k);
  const auto n = static_cast<long>(reference.size());
  const auto kk = static_cast<long>(k);
  double tp = 0, fp = 0, fn = 0;
  for (long start = 1 - kk; start <= n - 1; ++start) {
    std::set<long> window;
    for (long j = start; j < start + kk; ++j) {
      if (j >= 0 && j < n) window.insert(j);
    }
    double r = 0, c = 0;
    for (long j : window) {
      if (reference[j]) r += 1;
      if (hypothesis[j]) c += 1;
    }
    if (r < c) {
      tp += r;
      fp += c - r;
    } else {
      tp += c;
      fn += r - c;
    }
  }
  return finish(tp, fp, fn, k, none_set(reference), none_set(hypothesis));
}

CorpusEvaluation evaluate_corpus(const std::vector<Boundaries>& predictions,
                                 const std::vector<Boundaries>& references,
                                 size_t k) {
  if (predictions.size() != references.size()) {
    throw DimensionError("evaluate_corpus: " + std::to_string(predictions.size()) +
                         " predictions for " + std::to_string(references.size()) +
                         " shows");
  }
  if (references.empty()) throw DataError("evaluate_corpus: no shows");
  CorpusEvaluation out;
  for (size_t s = 0; s < references.size(); ++s) {
    if (references[s].empty()) {
      throw DataError("evaluate_corpus: show " + std::to_string(s) +
                      " has no tokens");
    }
    out.per_show.push_back(winpr(references[s], predictions[s], k));
  }
  for (const auto& r : out.per_show) {
    out.precision += r.precision;
    out.recall += r.recall;
    out.f1 += r.f1;
  }
  const double n = static_cast<double>(out.per_show.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  return out;
}

double improvement(double baseline_f1, double method_f1) {
  if (!(baseline_f1 > 0.0)) {
    throw UsageError("improvement: baseline F1 must be positive");
  }
  return 100.0 * (method_f1 - baseline_f1) / baseline_f1;
}

}  // namespace audioseg::eval
