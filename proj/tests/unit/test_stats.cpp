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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../common/stats_oracle.hpp"
#include "../common/stats_reference.hpp"
#include "audioseg/error.hpp"
#include "audioseg/random.hpp"
#include "audioseg/stats/tests.hpp"
#include "doctest.h"

using namespace audioseg;
using namespace audioseg::stats;

namespace {

ScoreTable make_table(const std::vector<std::vector<double>>& scores) {
  ScoreTable t;
  t.scores = scores;
  for (size_t j = 0; j < scores.at(0).size(); ++j) t.methods.push_back("m" + std::to_string(j));
  for (size_t i = 0; i < scores.size(); ++i) t.blocks.push_back("b" + std::to_string(i));
  return t;
}

ScoreTable random_table(Rng& rng, size_t n, size_t k) {
  std::vector<std::vector<double>> s(n, std::vector<double>(k));
  for (auto& row : s)
    for (size_t j = 0; j < k; ++j) row[j] = rng.uniform(0.2, 0.9) + 0.03 * double(j);
  return make_table(s);
}

}  // namespace

TEST_SUITE("chi-square") {
  TEST_CASE("closed forms") {
    CHECK(chi_square_cdf(0.0, 3) == 0.0);
    for (double x : {0.1, 1.0, 2.0, 5.5, 20.0})
      CHECK(std::abs(chi_square_cdf(x, 2) - (1 - std::exp(-x / 2))) < 1e-12);
    CHECK(chi_square_cdf(2.0, 2) == doctest::Approx(0.632121).epsilon(1e-6));
    CHECK(std::abs(chi_square_cdf(11.07, 5) - 0.95) < 1e-3);
  }

  TEST_CASE("agrees with numerical integration of the density") {
    for (int df : {1, 2, 3, 5, 6, 10, 25})
      for (double x : {0.05, 0.7, 2.0, 4.5, 11.07, 30.0}) {
        CAPTURE(df);
        CAPTURE(x);
        CHECK(std::abs(chi_square_cdf(x, df) - integrated_cdf(x, df)) < 1e-8);
      }
  }

  TEST_CASE("nondecreasing and bounded") {
    for (int df : {1, 4, 9}) {
      double prev = 0.0;
      for (double x = 0.0; x < 60.0; x += 0.25) {
        const double v = chi_square_cdf(x, df);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
      }
    }
  }

  TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(chi_square_cdf(-1.0, 2), UsageError);
    CHECK_THROWS_AS(chi_square_cdf(1.0, 0), UsageError);
  }
}

TEST_SUITE("ranks") {
  TEST_CASE("ties share the average position") {
    auto r = average_ranks({3.0, 1.0, 3.0, 2.0, 3.0});
    CHECK(r == std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0});
  }
}

TEST_SUITE("friedman aligned ranks") {
  TEST_CASE("matches the scipy reference tables") {
    for (const auto& ref : stats_references()) {
      auto res = friedman_aligned_ranks(make_table(ref.scores));
      CHECK(std::abs(res.statistic - ref.statistic) < 1e-9);
      CHECK(std::abs(res.p_value - ref.p_value) < 1e-9);
    }
  }

  TEST_CASE("matches the scripted computation on seeded 4x10 tables") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
      auto table = random_table(rng, 10, 4);
      CHECK(std::abs(friedman_aligned_ranks(table).statistic -
                     scripted_statistic(table.scores)) < 1e-9);
    }
  }

  TEST_CASE("two methods with a constant margin split the ranks in halves") {
    Rng rng(4);
    std::vector<std::vector<double>> s;
    for (int i = 0; i < 6; ++i) {
      const double a = rng.uniform();
      s.push_back({a, a + 0.1});
    }
    auto res = friedman_aligned_ranks(make_table(s));
    // A holds ranks 1..6 (all tied), B holds 7..12 (all tied).
    CHECK(res.method_rank_sums[0] == doctest::Approx(6 * 3.5));
    CHECK(res.method_rank_sums[1] == doctest::Approx(6 * 9.5));
  }

  TEST_CASE("rank sums satisfy the total identity") {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
      const size_t n = 2 + rng.below(15), k = 2 + rng.below(6);
      auto res = friedman_aligned_ranks(random_table(rng, n, k));
      const double total = double(k * n) * double(k * n + 1) / 2;
      CHECK(std::accumulate(res.method_rank_sums.begin(), res.method_rank_sums.end(), 0.0) ==
            doctest::Approx(total));
      CHECK(std::accumulate(res.block_rank_sums.begin(), res.block_rank_sums.end(), 0.0) ==
            doctest::Approx(total));
    }
  }

  TEST_CASE("shifting one block leaves the statistic unchanged") {
    Rng rng(13);
    // Scores on a 1/64 grid so the shifted alignment is exact.
    std::vector<std::vector<double>> s(8, std::vector<double>(4));
    for (auto& row : s)
      for (double& v : row) v = double(rng.below(64)) / 64.0;
    auto base = friedman_aligned_ranks(make_table(s));
    for (double shift : {0.25, -0.5, 3.0}) {
      auto moved = s;
      for (double& v : moved[3]) v += shift;
      CHECK(friedman_aligned_ranks(make_table(moved)).statistic ==
            doctest::Approx(base.statistic).epsilon(1e-12));
    }
  }

  TEST_CASE("constant blocks are a data error") {
    CHECK_THROWS_AS(friedman_aligned_ranks(make_table({{0.5, 0.5, 0.5}, {0.7, 0.7, 0.7}})),
                    DataError);
  }

  TEST_CASE("malformed tables") {
    CHECK_THROWS_AS(friedman_aligned_ranks(make_table({{0.5}, {0.7}})), DataError);
    CHECK_THROWS_AS(friedman_aligned_ranks(make_table({{0.5, 0.6}})), DataError);
    auto t = make_table({{0.5, 0.6}, {0.1, 0.2}});
    t.scores[1].pop_back();
    CHECK_THROWS_AS(friedman_aligned_ranks(t), DimensionError);
  }
}

TEST_SUITE("bonferroni-dunn") {
  TEST_CASE("matches the scipy reference tables") {
    for (const auto& ref : stats_references()) {
      auto table = make_table(ref.scores);
      auto res = bonferroni_dunn(table, "m0");
      CHECK(std::abs(res.baseline_avg_rank - ref.avg_rank[0]) < 1e-9);
      REQUIRE(res.rows.size() == ref.z.size() - 1);
      for (size_t j = 0; j < res.rows.size(); ++j) {
        CHECK(std::abs(res.rows[j].avg_rank - ref.avg_rank[j + 1]) < 1e-9);
        CHECK(std::abs(res.rows[j].z - ref.z[j + 1]) < 1e-9);
        CHECK(std::abs(res.rows[j].p_value - ref.p[j + 1]) < 1e-9);
        CHECK(std::abs(res.rows[j].p_adjusted - ref.p_adjusted[j + 1]) < 1e-9);
      }
    }
  }

  TEST_CASE("7x20 seeded tables match the scripted z values") {
    Rng rng(20);
    for (int t = 0; t < 5; ++t) {
      auto table = random_table(rng, 20, 7);
      for (size_t base : {0u, 3u}) {
        auto res = bonferroni_dunn(table, table.methods[base]);
        auto z = scripted_z(table.scores, base);
        for (size_t j = 0; j < z.size(); ++j) CHECK(std::abs(res.rows[j].z - z[j]) < 1e-12);
      }
    }
  }

  TEST_CASE("a copy of the baseline is never significant") {
    auto table = make_table({{0.4, 0.4, 0.9}, {0.6, 0.6, 0.2}, {0.5, 0.5, 0.7}});
    auto res = bonferroni_dunn(table, "m0");
    CHECK(res.rows[0].z == 0.0);
    CHECK(res.rows[0].p_adjusted == 1.0);
    CHECK(res.rows[0].significant_at.empty());
  }

  TEST_CASE("two methods use a factor of one") {
    auto res = bonferroni_dunn(make_table({{0.1, 0.5}, {0.2, 0.6}, {0.3, 0.2}}), "m0");
    CHECK(res.rows[0].p_adjusted == res.rows[0].p_value);
  }

  TEST_CASE("adjustment never lowers p and is capped at one") {
    Rng rng(30);
    for (int t = 0; t < 30; ++t) {
      auto res = bonferroni_dunn(random_table(rng, 3 + rng.below(10), 2 + rng.below(6)), "m0");
      for (const auto& row : res.rows) {
        CHECK(row.p_adjusted >= row.p_value);
        CHECK(row.p_adjusted <= 1.0);
        CHECK(row.p_value >= 0.0);
      }
    }
  }

  TEST_CASE("permuting method columns permutes the outputs") {
    Rng rng(31);
    auto table = random_table(rng, 12, 5);
    auto res = bonferroni_dunn(table, "m0");
    ScoreTable swapped = table;
    std::swap(swapped.methods[1], swapped.methods[4]);
    for (auto& row : swapped.scores) std::swap(row[1], row[4]);
    auto res2 = bonferroni_dunn(swapped, "m0");
    auto find = [](const PostHocResult& r, const std::string& m) {
      return *std::find_if(r.rows.begin(), r.rows.end(),
                           [&](const ComparisonRow& c) { return c.method == m; });
    };
    for (const char* m : {"m1", "m2", "m3", "m4"}) {
      CHECK(find(res, m).z == doctest::Approx(find(res2, m).z));
      CHECK(find(res, m).p_adjusted == doctest::Approx(find(res2, m).p_adjusted));
    }
  }

  TEST_CASE("flags follow the alpha levels") {
    const auto& ref = stats_references()[1];
    auto res = bonferroni_dunn(make_table(ref.scores), "m0", {0.02, 0.01});
    // Last method has p_adjusted ~3.4e-4.
    CHECK(res.rows.back().significant_at == std::vector<double>{0.02, 0.01});
    CHECK(res.rows.front().significant_at.empty());
  }

  TEST_CASE("unknown baseline") {
    CHECK_THROWS_AS(bonferroni_dunn(make_table({{0.1, 0.5}, {0.2, 0.6}}), "TXT"), UsageError);
  }
}
