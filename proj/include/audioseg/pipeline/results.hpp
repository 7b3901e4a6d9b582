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
// Persisted experiment results: the per-show results.tsv, the
// significance-test report, and the JSON and Markdown experiment reports.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "audioseg/stats/tests.hpp"

namespace audioseg::pipeline {

// show_id of the per-method macro-average row.
inline constexpr std::string_view kMacroRow = "MACRO";

struct ResultRow {
  std::string show_id;
  std::string method;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ResultsTable {
  uint64_t seed = 0;
  std::string config_hash;
  std::vector<ResultRow> rows;

  // In order of first appearance.
  std::vector<std::string> methods() const;
  std::vector<std::string> shows() const;  // excludes the macro rows
  const ResultRow& macro(const std::string& method) const;
  // Every method has one row per show and one macro row whose values are
  // the means of its show rows (within printing precision); values lie in
  // [0, 1]. Throws DataError.
  void validate() const;
};

// Header comment "# seed=<n> config=<hash>", then the column line
// "show_id method precision recall f1", then rows, tab-separated. Values
// are printed with six decimals.
std::string format_results_tsv(const ResultsTable& table);
ResultsTable parse_results_tsv(std::string_view text, const std::string& source = "results.tsv");
void write_results_tsv(const std::filesystem::path& path, const ResultsTable& table);
ResultsTable read_results_tsv(const std::filesystem::path& path);

// Blocks are shows, scores are per-show F1.
stats::ScoreTable score_table(const ResultsTable& table);

struct StatsReport {
  std::vector<double> alphas;
  stats::OmnibusResult omnibus;
  stats::PostHocResult posthoc;
};

StatsReport run_stats(const ResultsTable& table, const std::string& baseline,
                      const std::vector<double>& alphas = {0.02, 0.01});
// Number of alpha levels at which the method improves significantly on
// the baseline (adjusted p below alpha and a better mean rank).
int significance_stars(const stats::ComparisonRow& row);
std::string stats_json(const StatsReport& report, uint64_t seed, const std::string& config_hash);

struct MethodSummary {
  std::string method;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> improvement;  // percent over the baseline F1
  size_t units = 0;
  double lr = 0.0;
  double tau = 0.0;
  double val_f1 = 0.0;
  int best_epoch = 0;
};

struct ExperimentReport {
  uint64_t seed = 0;
  std::string config_hash;
  std::string baseline;
  size_t window_k = 10;
  ResultsTable results;
  std::vector<MethodSummary> methods;
  std::optional<StatsReport> stats;  // absent with a single method
  std::string stats_note;            // why stats are absent, if not obvious
};

// Fills the improvement column from the macro rows.
void fill_improvements(ExperimentReport& report);
std::string report_json(const ExperimentReport& report);
std::string report_markdown(const ExperimentReport& report);
// results.tsv, report.json and report.md in `dir`.
void write_experiment(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace audioseg::pipeline
