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

#include <cmath>

#include "audioseg/error.hpp"
#include "audioseg/eval/winpr.hpp"
#include "audioseg/random.hpp"
#include "doctest.h"

using namespace audioseg;
using namespace audioseg::eval;

namespace {

Boundaries random_boundaries(Rng& rng, size_t n, double density) {
  Boundaries b(n);
  for (auto& x : b) x = rng.uniform() < density ? 1 : 0;
  return b;
}

Boundaries single(size_t n, size_t pos) {
  Boundaries b(n, 0);
  b[pos] = 1;
  return b;
}

void check_same(const WinPRResult& a, const WinPRResult& b) {
  CHECK(a.tp == b.tp);
  CHECK(a.fp == b.fp);
  CHECK(a.fn == b.fn);
  CHECK(a.precision == b.precision);
  CHECK(a.recall == b.recall);
  CHECK(a.f1 == b.f1);
}

}  // namespace

TEST_SUITE("winpr") {
  TEST_CASE("identical sequences score perfectly") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
      auto x = random_boundaries(rng, 1 + rng.below(60), 0.2);
      if (std::none_of(x.begin(), x.end(), [](uint8_t v) { return v; })) x[0] = 1;
      auto r = winpr(x, x, 1 + rng.below(12));
      CHECK(r.precision == 1.0);
      CHECK(r.recall == 1.0);
      CHECK(r.f1 == 1.0);
      CHECK(r.fp == 0.0);
      CHECK(r.fn == 0.0);
    }
  }

  TEST_CASE("one-position miss with k=10 gives 9/1/1") {
    auto r = winpr(single(40, 20), single(40, 21), 10);
    CHECK(r.tp == 9.0);
    CHECK(r.fp == 1.0);
    CHECK(r.fn == 1.0);
    CHECK(r.precision == doctest::Approx(0.9));
    CHECK(r.recall == doctest::Approx(0.9));
    CHECK(r.f1 == doctest::Approx(0.9));
  }

  TEST_CASE("degenerate conventions") {
    Boundaries zeros(30, 0);
    auto both = winpr(zeros, zeros, 10);
    CHECK(both.precision == 1.0);
    CHECK(both.recall == 1.0);
    CHECK(both.f1 == 1.0);
    auto missing = winpr(single(30, 5), zeros, 10);
    CHECK(missing.precision == 0.0);
    CHECK(missing.recall == 0.0);
    CHECK(missing.f1 == 0.0);
    auto spurious = winpr(zeros, single(30, 5), 10);
    CHECK(spurious.precision == 0.0);
    CHECK(spurious.recall == 0.0);
    CHECK(spurious.f1 == 0.0);
  }

  TEST_CASE("k=1 counts exact positional matches") {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
      const size_t n = 1 + rng.below(40);
      auto a = random_boundaries(rng, n, 0.3), b = random_boundaries(rng, n, 0.3);
      double both = 0;
      for (size_t i = 0; i < n; ++i) both += (a[i] && b[i]);
      CHECK(winpr(a, b, 1).tp == both);
    }
  }

  TEST_CASE("matches the brute-force oracle on 1000 random cases") {
    Rng rng(2024);
    for (int t = 0; t < 1000; ++t) {
      const size_t n = 1 + rng.below(50);
      const size_t k = 1 + rng.below(12);
      const double density = rng.uniform(0.0, 0.5);
      auto a = random_boundaries(rng, n, density);
      auto b = random_boundaries(rng, n, density);
      CAPTURE(t);
      check_same(winpr(a, b, k), winpr_oracle(a, b, k));
    }
  }

  TEST_CASE("swapping arguments swaps precision and recall") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      const size_t n = 1 + rng.below(50), k = 1 + rng.below(12);
      auto a = random_boundaries(rng, n, 0.2), b = random_boundaries(rng, n, 0.2);
      auto ab = winpr(a, b, k), ba = winpr(b, a, k);
      CHECK(ab.tp == ba.tp);
      CHECK(ab.precision == ba.recall);
      CHECK(ab.recall == ba.precision);
    }
  }

  TEST_CASE("shift law at interior positions") {
    for (size_t k = 1; k <= 12; ++k) {
      for (size_t d = 0; d <= k; ++d) {
        const size_t n = 80, p = 30;
        auto r = winpr(single(n, p), single(n, p + d), k);
        auto o = winpr_oracle(single(n, p), single(n, p + d), k);
        CAPTURE(k);
        CAPTURE(d);
        CHECK(r.precision == doctest::Approx(double(k - d) / k));
        CHECK(r.recall == doctest::Approx(double(k - d) / k));
        check_same(r, o);
      }
    }
  }

  TEST_CASE("a wider window never hurts a shifted single boundary") {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
      const size_t n = 20 + rng.below(40), shift = rng.below(5);
      const size_t pos = rng.below(n - shift);
      auto ref = single(n, pos), hyp = single(n, pos + shift);
      for (size_t k = 1; k < 15; ++k)
        CHECK(winpr(ref, hyp, k + 1).f1 >= winpr(ref, hyp, k).f1);
    }
  }

  TEST_CASE("with several boundaries a wider window can lower F1") {
    // Shifted copies of multi-boundary sequences are not monotone in k:
    // neighbouring boundaries start sharing windows with the wrong partner.
    Rng rng(77);
    bool found = false;
    for (int t = 0; t < 200 && !found; ++t) {
      const size_t n = 20 + rng.below(40);
      auto ref = random_boundaries(rng, n, 0.15);
      Boundaries hyp(n, 0);
      for (size_t i = 0; i + 1 < n; ++i) hyp[i + 1] = ref[i];
      for (size_t k = 1; k < 15 && !found; ++k)
        found = winpr(ref, hyp, k + 1).f1 < winpr(ref, hyp, k).f1;
    }
    CHECK(found);
  }

  TEST_CASE("stored F1 is the harmonic mean of stored P and R") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      const size_t n = 1 + rng.below(50), k = 1 + rng.below(12);
      auto r = winpr(random_boundaries(rng, n, 0.3), random_boundaries(rng, n, 0.3), k);
      const double f = r.precision + r.recall > 0
                           ? 2 * r.precision * r.recall / (r.precision + r.recall)
                           : 0.0;
      CHECK(std::abs(f - r.f1) < 1e-9);
    }
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(winpr(Boundaries(3), Boundaries(4), 2), DimensionError);
    CHECK_THROWS_AS(winpr(Boundaries(3), Boundaries(3), 0), UsageError);
    CHECK_THROWS_AS(winpr_oracle(Boundaries(3), Boundaries(4), 2), DimensionError);
  }
}

TEST_SUITE("corpus evaluation") {
  TEST_CASE("single show macro equals its own result") {
    auto ref = single(30, 10), hyp = single(30, 12);
    auto e = evaluate_corpus({hyp}, {ref}, 10);
    CHECK(e.f1 == e.per_show[0].f1);
    CHECK(e.precision == e.per_show[0].precision);
  }

  TEST_CASE("macro F1 is the unweighted mean") {
    // Ref one boundary, hyp shifted by 6 and 2 with k=10 -> F1 0.4 and 0.8.
    auto e = evaluate_corpus({single(50, 26), single(50, 22)},
                             {single(50, 20), single(50, 20)}, 10);
    CHECK(e.per_show[0].f1 == doctest::Approx(0.4));
    CHECK(e.per_show[1].f1 == doctest::Approx(0.8));
    CHECK(e.f1 == doctest::Approx(0.6));
  }

  TEST_CASE("perfect predictions") {
    std::vector<Boundaries> refs{single(10, 3), single(20, 7), Boundaries(5, 0)};
    auto e = evaluate_corpus(refs, refs);
    CHECK(e.precision == 1.0);
    CHECK(e.recall == 1.0);
    CHECK(e.f1 == 1.0);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(evaluate_corpus({}, {}), DataError);
    CHECK_THROWS_AS(evaluate_corpus({Boundaries{}}, {Boundaries{}}), DataError);
    CHECK_THROWS_AS(evaluate_corpus({single(5, 1)}, {}), DimensionError);
  }
}

TEST_SUITE("improvement") {
  TEST_CASE("reported table rows") {
    CHECK(std::abs(improvement(0.615, 0.813) - 32.3) <= 0.2);
    CHECK(std::abs(improvement(0.615, 0.673) - 9.4) <= 0.2);
    CHECK(improvement(0.42, 0.42) == 0.0);
  }

  TEST_CASE("non-positive baseline is rejected") {
    CHECK_THROWS_AS(improvement(0.0, 0.5), UsageError);
    CHECK_THROWS_AS(improvement(-0.1, 0.5), UsageError);
  }
}
