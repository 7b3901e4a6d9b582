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
#include <string>
#include <vector>

namespace audioseg::stats {

// Rows are blocks (evaluation shows), columns are methods.
struct ScoreTable {
  std::vector<std::string> methods;
  std::vector<std::string> blocks;
  std::vector<std::vector<double>> scores;  // [block][method]

  size_t n_methods() const { return methods.size(); }
  size_t n_blocks() const { return blocks.size(); }
  void validate() const;
};

struct OmnibusResult {
  double statistic = 0.0;
  double p_value = 1.0;
  size_t df = 0;
  std::vector<double> method_rank_sums;
  std::vector<double> block_rank_sums;
};

struct ComparisonRow {
  std::string method;
  double avg_rank = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  std::vector<double> significant_at;
};

struct PostHocResult {
  std::string baseline;
  double baseline_avg_rank = 0.0;
  double critical_scale = 0.0;  // sqrt(k(k+1)/(6n))
  std::vector<ComparisonRow> rows;
};

// Average ranks (1-based) of values in ascending order; ties share the
// mean of the positions they occupy.
std::vector<double> average_ranks(const std::vector<double>& values);

// P(X <= x) for X ~ chi-square with df degrees of freedom.
double chi_square_cdf(double x, int df);

// Friedman aligned-ranks omnibus test. Throws DataError when every block
// is constant across methods.
OmnibusResult friedman_aligned_ranks(const ScoreTable& table);

// Each method against the baseline using within-block ranks where rank 1
// is the highest score. Positive z means the method ranks better than the
// baseline. p is two-sided; p_adjusted = min(1, p * (k-1)).
PostHocResult bonferroni_dunn(const ScoreTable& table,
                              const std::string& baseline,
                              const std::vector<double>& alpha_levels = {0.02,
                                                                         0.01});

}  // namespace audioseg::stats
