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

#include "audioseg/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "audioseg/error.hpp"

namespace audioseg::stats {

void ScoreTable::validate() const {
  if (methods.size() < 2) throw DataError("score table needs at least 2 methods");
  if (blocks.size() < 2) throw DataError("score table needs at least 2 blocks");
  if (scores.size() != blocks.size()) {
    throw DimensionError("score table has " + std::to_string(scores.size()) +
                         " rows for " + std::to_string(blocks.size()) + " blocks");
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != methods.size()) {
      throw DimensionError("score table row " + blocks[i] + " has " +
                           std::to_string(scores[i].size()) + " cells");
    }
    for (double v : scores[i]) {
      if (!std::isfinite(v)) throw DataError("score table row " + blocks[i] +
                                             " has a non-finite score");
    }
  }
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * double(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double chi_square_cdf(double x, int df) {
  if (df < 1) throw UsageError("chi_square_cdf: df must be at least 1");
  if (!(x >= 0.0)) throw UsageError("chi_square_cdf: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

OmnibusResult friedman_aligned_ranks(const ScoreTable& table) {
  table.validate();
  const size_t k = table.n_methods(), n = table.n_blocks();
  bool all_constant = true;
  for (const auto& row : table.scores) {
    if (std::any_of(row.begin(), row.end(), [&](double v) { return v != row[0]; })) {
      all_constant = false;
      break;
    }
  }
  if (all_constant) {
    throw DataError("friedman_aligned_ranks: every block is constant across methods");
  }

  std::vector<double> aligned;
  aligned.reserve(k * n);
  for (const auto& row : table.scores) {
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / double(k);
    for (double v : row) aligned.push_back(v - mean);
  }
  const auto ranks = average_ranks(aligned);

  OmnibusResult out;
  out.df = k - 1;
  out.method_rank_sums.assign(k, 0.0);
  out.block_rank_sums.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < k; ++j) {
      out.method_rank_sums[j] += ranks[i * k + j];
      out.block_rank_sums[i] += ranks[i * k + j];
    }
  }
  const double kd = double(k), nd = double(n), kn = kd * nd;
  double sum_rj2 = 0.0, sum_ri2 = 0.0;
  for (double r : out.method_rank_sums) sum_rj2 += r * r;
  for (double r : out.block_rank_sums) sum_ri2 += r * r;
  const double numerator =
      (kd - 1.0) * (sum_rj2 - (kd * nd * nd / 4.0) * (kn + 1.0) * (kn + 1.0));
  const double denominator =
      kn * (kn + 1.0) * (2.0 * kn + 1.0) / 6.0 - sum_ri2 / kd;
  if (!(denominator > 0.0)) {
    throw NumericError("friedman_aligned_ranks: non-positive denominator");
  }
  out.statistic = numerator / denominator;
  out.p_value = 1.0 - chi_square_cdf(std::max(0.0, out.statistic), int(out.df));
  return out;
}

PostHocResult bonferroni_dunn(const ScoreTable& table, const std::string& baseline,
                              const std::vector<double>& alpha_levels) {
  table.validate();
  const auto it = std::find(table.methods.begin(), table.methods.end(), baseline);
  if (it == table.methods.end()) {
    throw UsageError("bonferroni_dunn: baseline '" + baseline + "' not in table");
  }
  const size_t base = size_t(it - table.methods.begin());
  const size_t k = table.n_methods(), n = table.n_blocks();

  std::vector<double> avg(k, 0.0);
  for (const auto& row : table.scores) {
    std::vector<double> negated(row.size());
    std::transform(row.begin(), row.end(), negated.begin(), std::negate<>());
    const auto r = average_ranks(negated);
    for (size_t j = 0; j < k; ++j) avg[j] += r[j];
  }
  for (double& a : avg) a /= double(n);

  PostHocResult out;
  out.baseline = baseline;
  out.baseline_avg_rank = avg[base];
  out.critical_scale = std::sqrt(double(k) * double(k + 1) / (6.0 * double(n)));
  for (size_t j = 0; j < k; ++j) {
    if (j == base) continue;
    ComparisonRow row;
    row.method = table.methods[j];
    row.avg_rank = avg[j];
    row.z = (avg[base] - avg[j]) / out.critical_scale;
    row.p_value = std::erfc(std::abs(row.z) / std::sqrt(2.0));
    row.p_adjusted = std::min(1.0, row.p_value * double(k - 1));
    for (double a : alpha_levels) {
      if (row.p_adjusted < a) row.significant_at.push_back(a);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace audioseg::stats
