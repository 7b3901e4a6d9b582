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

#include "audioseg/pipeline/results.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audioseg/error.hpp"
#include "audioseg/eval/winpr.hpp"

namespace audioseg::pipeline {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kColumns = "show_id\tmethod\tprecision\trecall\tf1";
// Six printed decimals round each value by at most 5e-7.
constexpr double kPrintSlack = 1.5e-6;

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace

std::vector<std::string> ResultsTable::methods() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (seen.insert(r.method).second) out.push_back(r.method);
  }
  return out;
}

std::vector<std::string> ResultsTable::shows() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (r.show_id != kMacroRow && seen.insert(r.show_id).second) out.push_back(r.show_id);
  }
  return out;
}

const ResultRow& ResultsTable::macro(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.method == method && r.show_id == kMacroRow) return r;
  }
  throw DataError("results: no macro row for method " + method);
}

void ResultsTable::validate() const {
  if (rows.empty()) throw DataError("results: no rows");
  const auto all_methods = methods();
  const auto all_shows = shows();
  if (all_shows.empty()) throw DataError("results: no per-show rows");
  std::map<std::string, std::set<std::string>> per_method;
  std::map<std::string, int> macro_count;
  std::map<std::string, std::array<double, 3>> sums;
  for (const auto& r : rows) {
    if (r.show_id.empty() || r.method.empty()) throw DataError("results: empty show_id or method");
    for (double v : {r.precision, r.recall, r.f1}) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("results: value out of [0, 1] for " + r.method + " on " + r.show_id);
      }
    }
    if (r.show_id == kMacroRow) {
      ++macro_count[r.method];
      continue;
    }
    if (!per_method[r.method].insert(r.show_id).second) {
      throw DataError("results: duplicate row for " + r.method + " on " + r.show_id);
    }
    auto& s = sums[r.method];
    s[0] += r.precision;
    s[1] += r.recall;
    s[2] += r.f1;
  }
  const double n = double(all_shows.size());
  for (const auto& m : all_methods) {
    if (per_method[m].size() != all_shows.size()) {
      throw DataError("results: method " + m + " lacks rows for some shows");
    }
    if (macro_count[m] != 1) {
      throw DataError("results: method " + m + " needs exactly one " + std::string(kMacroRow) +
                      " row");
    }
    const auto& mr = macro(m);
    const auto& s = sums[m];
    if (std::abs(mr.precision - s[0] / n) > kPrintSlack ||
        std::abs(mr.recall - s[1] / n) > kPrintSlack || std::abs(mr.f1 - s[2] / n) > kPrintSlack) {
      throw DataError("results: macro row of " + m + " is not the mean of its show rows");
    }
  }
  const size_t expected = all_methods.size() * (all_shows.size() + 1);
  if (rows.size() != expected) {
    throw DataError("results: expected " + std::to_string(expected) + " rows, found " +
                    std::to_string(rows.size()));
  }
}

std::string format_results_tsv(const ResultsTable& table) {
  table.validate();
  std::string out = "# seed=" + std::to_string(table.seed) + " config=" + table.config_hash + "\n";
  out += std::string(kColumns) + "\n";
  for (const auto& r : table.rows) {
    out += r.show_id + "\t" + r.method + "\t" + fixed6(r.precision) + "\t" + fixed6(r.recall) +
           "\t" + fixed6(r.f1) + "\n";
  }
  return out;
}

ResultsTable parse_results_tsv(std::string_view text, const std::string& source) {
  ResultsTable table;
  auto fail = [&](size_t line, const std::string& why) {
    throw DataError(source + ":" + std::to_string(line) + ": " + why);
  };
  size_t line_no = 0;
  bool header_seen = false;
  bool columns_seen = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!columns_seen && line.front() == '#') {
      if (header_seen) fail(line_no, "repeated header comment");
      header_seen = true;
      for (auto field : split(line.substr(1), ' ')) {
        if (field.rfind("seed=", 0) == 0) {
          const auto v = field.substr(5);
          auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), table.seed);
          if (ec != std::errc() || p != v.data() + v.size()) fail(line_no, "bad seed");
        } else if (field.rfind("config=", 0) == 0) {
          table.config_hash = std::string(field.substr(7));
        }
      }
      continue;
    }
    if (!columns_seen) {
      if (line != kColumns) fail(line_no, "expected columns '" + std::string(kColumns) + "'");
      columns_seen = true;
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != 5) fail(line_no, "expected 5 tab-separated fields, found " + std::to_string(f.size()));
    ResultRow r;
    r.show_id = std::string(f[0]);
    r.method = std::string(f[1]);
    double* dst[3] = {&r.precision, &r.recall, &r.f1};
    for (int i = 0; i < 3; ++i) {
      const auto v = f[size_t(i) + 2];
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), *dst[i]);
      if (ec != std::errc() || p != v.data() + v.size()) {
        fail(line_no, "bad number '" + std::string(v) + "'");
      }
    }
    table.rows.push_back(std::move(r));
  }
  if (!columns_seen) throw DataError(source + ": missing column line");
  try {
    table.validate();
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  return table;
}

void write_results_tsv(const fs::path& path, const ResultsTable& table) {
  write_text(path, format_results_tsv(table));
}

ResultsTable read_results_tsv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_results_tsv(ss.str(), path.string());
}

stats::ScoreTable score_table(const ResultsTable& table) {
  stats::ScoreTable t;
  t.methods = table.methods();
  t.blocks = table.shows();
  std::map<std::pair<std::string, std::string>, double> f1;
  for (const auto& r : table.rows) f1[{r.show_id, r.method}] = r.f1;
  for (const auto& show : t.blocks) {
    std::vector<double> row;
    for (const auto& m : t.methods) {
      auto it = f1.find({show, m});
      if (it == f1.end()) throw DataError("results: no row for " + m + " on " + show);
      row.push_back(it->second);
    }
    t.scores.push_back(std::move(row));
  }
  return t;
}

StatsReport run_stats(const ResultsTable& table, const std::string& baseline,
                      const std::vector<double>& alphas) {
  const auto t = score_table(table);
  if (t.n_methods() < 2) throw UsageError("stats: need at least two methods");
  StatsReport r;
  r.alphas = alphas;
  r.omnibus = stats::friedman_aligned_ranks(t);
  r.posthoc = stats::bonferroni_dunn(t, baseline, alphas);
  return r;
}

int significance_stars(const stats::ComparisonRow& row) {
  if (!(row.z > 0)) return 0;
  return int(row.significant_at.size());
}

namespace {

json stats_object(const StatsReport& r) {
  json rows = json::array();
  for (const auto& c : r.posthoc.rows) {
    rows.push_back({{"method", c.method},
                    {"avg_rank", c.avg_rank},
                    {"z", c.z},
                    {"p_value", c.p_value},
                    {"p_adjusted", c.p_adjusted},
                    {"significant_at", c.significant_at},
                    {"stars", significance_stars(c)}});
  }
  return {{"omnibus_statistic", r.omnibus.statistic},
          {"omnibus_p", r.omnibus.p_value},
          {"df", r.omnibus.df},
          {"baseline", r.posthoc.baseline},
          {"baseline_avg_rank", r.posthoc.baseline_avg_rank},
          {"critical_scale", r.posthoc.critical_scale},
          {"alpha", r.alphas},
          {"comparisons", rows}};
}

}  // namespace

std::string stats_json(const StatsReport& report, uint64_t seed, const std::string& config_hash) {
  json j = stats_object(report);
  j["format"] = "audioseg-stats";
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

void fill_improvements(ExperimentReport& report) {
  const MethodSummary* base = nullptr;
  for (const auto& m : report.methods) {
    if (m.method == report.baseline) base = &m;
  }
  const double base_f1 = base ? base->f1 : 0.0;
  for (auto& m : report.methods) {
    m.improvement.reset();
    if (base && &m != base && base_f1 > 0) m.improvement = eval::improvement(base_f1, m.f1);
  }
}

std::string report_json(const ExperimentReport& report) {
  json methods = json::array();
  for (const auto& m : report.methods) {
    json per_show = json::array();
    for (const auto& r : report.results.rows) {
      if (r.method == m.method && r.show_id != kMacroRow) {
        per_show.push_back(
            {{"show_id", r.show_id}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}});
      }
    }
    methods.push_back({{"method", m.method},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"improvement", m.improvement ? json(*m.improvement) : json(nullptr)},
                       {"segmenter",
                        {{"units", m.units},
                         {"lr", m.lr},
                         {"tau", m.tau},
                         {"val_f1", m.val_f1},
                         {"best_epoch", m.best_epoch}}},
                       {"per_show", per_show}});
  }
  json j = {{"format", "audioseg-report"},
            {"seed", report.seed},
            {"config_hash", report.config_hash},
            {"window_k", report.window_k},
            {"baseline", report.baseline},
            {"test_shows", report.results.shows()},
            {"methods", methods}};
  if (report.stats) j["stats"] = stats_object(*report.stats);
  if (!report.stats_note.empty()) j["stats_note"] = report.stats_note;
  return j.dump(2) + "\n";
}

std::string report_markdown(const ExperimentReport& report) {
  std::map<std::string, int> stars;
  if (report.stats) {
    for (const auto& c : report.stats->posthoc.rows) stars[c.method] = significance_stars(c);
  }
  std::ostringstream md;
  md << "# Segmentation results\n\n";
  md << "WinPR@" << report.window_k << " macro-averaged over " << report.results.shows().size()
     << " test shows. Seed " << report.seed << ", config " << report.config_hash << ".\n\n";
  md << "| Method | P | R | F1 | Impr. | Sig. |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& m : report.methods) {
    std::string impr;
    if (m.improvement) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%+.1f%%", *m.improvement);
      impr = buf;
    }
    md << "| " << m.method << " | " << fixed3(m.precision) << " | " << fixed3(m.recall) << " | "
       << fixed3(m.f1) << " | " << impr << " | " << std::string(size_t(stars[m.method]), '*')
       << " |\n";
  }
  if (report.stats) {
    const auto& s = *report.stats;
    md << "\nImpr. is the relative F1 change over " << report.baseline << ". ";
    md << "Friedman aligned ranks: T = " << fixed3(s.omnibus.statistic) << ", df = " << s.omnibus.df
       << ", p = " << fixed3(s.omnibus.p_value) << ". ";
    md << "Stars mark a Bonferroni-Dunn improvement over " << report.baseline;
    for (size_t i = 0; i < s.alphas.size(); ++i) {
      md << (i ? ", " : " (") << std::string(i + 1, '*') << " adjusted p < " << s.alphas[i];
    }
    md << (s.alphas.empty() ? ".\n" : ").\n");
  } else if (!report.stats_note.empty()) {
    md << "\nNo significance tests: " << report.stats_note << "\n";
  }
  return md.str();
}

void write_experiment(const ExperimentReport& report, const fs::path& dir) {
  write_results_tsv(dir / "results.tsv", report.results);
  write_text(dir / "report.json", report_json(report));
  write_text(dir / "report.md", report_markdown(report));
}

}  // namespace audioseg::pipeline
