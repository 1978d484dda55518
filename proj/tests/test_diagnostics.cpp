// Copyright 2026 The mmspace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "mmspace/coalescent.hpp"
#include "mmspace/diagnostics.hpp"
#include "mmspace/error.hpp"
#include "mmspace/fixtures.hpp"
#include "mmspace/space.hpp"

using namespace mmspace;

namespace {

std::vector<FiniteMMSpace> family(const std::string& stem, int lo, int hi) {
  std::vector<FiniteMMSpace> f;
  for (int n = lo; n <= hi; ++n) f.push_back(fixture(stem + std::to_string(n)));
  return f;
}

std::vector<double> dyadic(int from, int to) {
  std::vector<double> g;
  for (int k = from; k <= to; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

const std::vector<double> kCGrid{1, 2, 3, 4, 5};

}  // namespace

TEST_SUITE("fixtures") {
  TEST_CASE("three-point weights sum to one") {
    const auto y = fixture("exp25_y");
    CHECK(y.weight(0) + y.weight(1) + y.weight(2) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("equidistant fixture") {
    const auto x = fixture("exp212ii:3");
    CHECK(x.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(x.weight(i) == 0.125);
      for (std::size_t j = 0; j < 8; ++j) CHECK(x.distance(i, j) == (i == j ? 0.0 : 1.0));
    }
  }

  TEST_CASE("two-cluster fixtures: equal profiles, not isomorphic") {
    const auto x = fixture("exp62_x"), y = fixture("exp62_y");
    CHECK(random_distance_distribution(x).approx_equal(random_distance_distribution(y), 1e-12));
    CHECK_FALSE(are_isomorphic(x, y));
  }

  TEST_CASE("unknown names") {
    for (const char* bad : {"nope", "exp212i:0", "exp212ii:x", "exp212ii:", "exp62_z"}) {
      CAPTURE(bad);
      try {
        fixture(bad);
        FAIL("expected UnknownFixture");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kUnknownFixture);
      }
    }
  }
}

TEST_SUITE("precompactness") {
  TEST_CASE("far-apart pairs fail the tail condition") {
    const auto r = precompactness_report(family("exp212i:", 1, 8), dyadic(1, 8), kCGrid);
    CHECK(r.tail.back().mean >= 0.5);
    CHECK_FALSE(r.condition_i.passed);
    CHECK(r.condition_ii.passed);
  }

  TEST_CASE("equidistant family fails the modulus condition") {
    const auto r = precompactness_report(family("exp212ii:", 1, 8), dyadic(1, 8), kCGrid);
    for (const auto& v : r.v) CHECK(v.mean == 1.0);
    CHECK(r.condition_i.passed);
    CHECK_FALSE(r.condition_ii.passed);
  }

  TEST_CASE("a single space passes") {
    const auto r = precompactness_report({fixture("exp62_x")}, {0.04, 0.1}, {4.0});
    CHECK(r.condition_i.passed);
    CHECK(r.condition_ii.passed);
  }

  TEST_CASE("sup of v is monotone in delta") {
    std::vector<FiniteMMSpace> f{fixture("exp25_x"), fixture("exp25_y"), fixture("exp62_x"), fixture("exp62_y")};
    const auto grid = dyadic(1, 10);  // decreasing
    const auto r = precompactness_report(f, grid, kCGrid);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(r.v[i].mean <= r.v[i - 1].mean);
  }

  TEST_CASE("empty family") {
    CHECK_THROWS_AS(precompactness_report({}, {0.1}, {1}), Error);
  }
}

TEST_SUITE("tightness") {
  TEST_CASE("deterministic sampler") {
    const auto x = fixture("exp62_y");
    const SpaceSampler fixed = [&](Rng&) { return x; };
    const auto t = tightness_report(fixed, 7, {0.05, 0.1}, {0.2, 0.5}, {3.0}, Rng(1));
    CHECK(t.family.v[1].mean == modulus_of_mass_distribution(x, 0.1));
    CHECK(t.family.v[1].std_error == 0.0);
    CHECK(t.thin_mass[0][1].mean == doctest::Approx(thin_mass(x, 0.5, 0.05)).epsilon(1e-15));
    CHECK(t.thin_mass[0][1].std_error == 0.0);
    CHECK(t.family.tail[0].mean == distance_distribution(x).mass_at_least(3.0));
  }

  TEST_CASE("kingman trees have a small modulus") {
    auto table = std::make_shared<MergerTable>(LambdaMeasure::kingman());
    const SpaceSampler s = [table](Rng& rng) { return coalescent_to_mmspace(simulate(*table, 200, rng)); };
    const auto t = tightness_report(s, 20, {1e-3}, {0.1}, {5.0}, Rng(2));
    CHECK(t.family.v[0].mean < 0.1);
  }

  TEST_CASE("dust keeps thin mass while kingman loses it") {
    const std::vector<double> deltas{1e-2, 3e-3, 1e-3};
    auto report = [&](const LambdaMeasure& l) {
      auto table = std::make_shared<MergerTable>(l);
      const SpaceSampler s = [table](Rng& rng) { return coalescent_to_mmspace(simulate(*table, 1000, rng)); };
      return tightness_report(s, 6, deltas, {0.05}, {5.0}, Rng(3));
    };
    const auto dust = report(LambdaMeasure::beta(1.5, 0.5));
    const auto king = report(LambdaMeasure::kingman());
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      CHECK(dust.thin_mass[d][0].mean > 0.5);
      if (d > 0) CHECK(king.thin_mass[d][0].mean <= king.thin_mass[d - 1][0].mean);
    }
    CHECK(king.thin_mass.back()[0].mean < 0.01);
    // No decay for the dust tree along the shrinking deltas.
    CHECK(dust.thin_mass.back()[0].mean >= dust.thin_mass.front()[0].mean - 0.1);
  }
}

TEST_SUITE("convergence cross-check") {
  TEST_CASE("constant sequence") {
    const auto x = fixture("exp25_y");
    const Polynomial p{2, [](std::span<const double> r) { return r[0]; }};
    const auto t = convergence_crosscheck({x, x, x}, {p}, 1e-12);
    for (const auto& row : t.rows) {
      CHECK(row.gpr.upper == 0.0);
      CHECK(row.poly_gaps[0] == 0.0);
    }
    CHECK(t.implication_holds);
  }

  TEST_CASE("two points approaching distance one") {
    std::vector<FiniteMMSpace> seq;
    for (int n = 1; n <= 8; ++n) {
      const double d = 1.0 + 1.0 / n;
      seq.push_back(FiniteMMSpace::unlabelled(Matrix::from_rows({{0, d}, {d, 0}}), {0.5, 0.5}));
    }
    const Polynomial mean{2, [](std::span<const double> r) { return r[0]; }};
    const auto t = convergence_crosscheck(seq, {mean}, 0.1);
    for (const auto& row : t.rows) {
      const double n = static_cast<double>(row.index + 1);
      CHECK(row.gpr.upper <= 1.0 / n);
      CHECK(row.poly_gaps[0] <= 1.0 / n);
    }
    CHECK(t.implication_holds);
  }

  TEST_CASE("equidistant sequence separates the metrics") {
    const auto t = convergence_crosscheck(family("exp212ii:", 1, 3), {}, 0.05);
    for (const auto& row : t.rows) {
      const double n = static_cast<double>(row.index + 1);
      CHECK(row.eurandom.upper <= std::ldexp(1.0, -static_cast<int>(n) + 1));
      CHECK(row.gpr.upper == 0.5);
    }
    CHECK_FALSE(t.gpr_vanishing);
  }
}
