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

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmspace/error.hpp"
#include "mmspace/fixtures.hpp"
#include "mmspace/functionals.hpp"
#include "mmspace/metrics.hpp"
#include "mmspace/quadratic.hpp"
#include "mmspace/transport.hpp"
#include "support.hpp"

using namespace mmspace;
using mmspace::testing::random_space;

namespace {

FiniteMMSpace two_points(double d, double a = 0.5) {
  return FiniteMMSpace::unlabelled(Matrix::from_rows({{0, d}, {d, 0}}), {a, 1.0 - a});
}

std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = 1.0 + static_cast<double>(rng.below(6)));
  for (double& x : w) x /= total;
  return w;
}

// Minimum cost over all basic feasible solutions: every choice of n+m-1
// cells whose equality system has a unique nonnegative solution.
double transport_by_vertices(const Matrix& cost, const std::vector<double>& mu,
                             const std::vector<double>& nu) {
  const std::size_t n = mu.size(), m = nu.size(), cells = n * m;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n + m));
  for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = mu[i];
  for (std::size_t j = 0; j < m; ++j) rhs(static_cast<Eigen::Index>(n + j)) = nu[j];
  for (std::uint32_t s = 1; s < (1u << cells); ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) != n + m - 1) continue;
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + m),
                                              static_cast<Eigen::Index>(n + m - 1));
    std::vector<std::size_t> sup;
    for (std::size_t c = 0; c < cells; ++c)
      if (s >> c & 1) sup.push_back(c);
    for (std::size_t a = 0; a < sup.size(); ++a) {
      e(static_cast<Eigen::Index>(sup[a] / m), static_cast<Eigen::Index>(a)) = 1;
      e(static_cast<Eigen::Index>(n + sup[a] % m), static_cast<Eigen::Index>(a)) = 1;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
    if (lu.rank() != static_cast<Eigen::Index>(n + m - 1)) continue;
    const Eigen::VectorXd x = lu.solve(rhs);
    if ((e * x - rhs).norm() > 1e-9 || x.minCoeff() < -1e-12) continue;
    double v = 0.0;
    for (std::size_t a = 0; a < sup.size(); ++a) v += x(static_cast<Eigen::Index>(a)) * cost(sup[a] / m, sup[a] % m);
    best = std::min(best, v);
  }
  return best;
}

// Prohorov distance from the closed-set definition: the smallest candidate
// level c with mu(A) <= nu(A^{c+eta}) + c + eta for every subset A, where
// A^e is the open e-neighbourhood.
double prohorov_by_subsets(const Matrix& d, const std::vector<double>& mu,
                           const std::vector<double>& nu) {
  const std::size_t k = mu.size();
  auto excess = [&](double eps) {
    double worst = 0.0;
    for (std::uint32_t a = 1; a < (1u << k); ++a) {
      double ma = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        if (a >> i & 1) ma += mu[i];
      for (std::size_t j = 0; j < k; ++j) {
        bool near = false;
        for (std::size_t i = 0; i < k && !near; ++i) near = (a >> i & 1) && d(i, j) < eps;
        if (near) nb += nu[j];
      }
      worst = std::max(worst, ma - nb);
    }
    return worst;
  };
  const double eta = 1e-9;
  std::vector<double> cand{0.0};
  for (double v : d.data()) {
    cand.push_back(v);
    cand.push_back(excess(v + eta));
  }
  cand.push_back(excess(eta));
  std::sort(cand.begin(), cand.end());
  for (double c : cand)
    if (c >= 0 && excess(c + eta) <= c + eta + 1e-12) return c;
  return 1.0;
}

template <class Objective>
double min_over_all_relations(const FiniteMMSpace& x, const FiniteMMSpace& y, Objective obj) {
  const std::size_t n = x.size(), m = y.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 1; s < (1u << (n * m)); ++s) {
    Relation r(n, m);
    for (std::size_t c = 0; c < n * m; ++c)
      if (s >> c & 1) r.set(c / m, c % m, true);
    best = std::min(best, obj(r));
  }
  return best;
}

double gh_by_correspondences(const FiniteMMSpace& x, const FiniteMMSpace& y) {
  const std::size_t n = x.size(), m = y.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 1; s < (1u << (n * m)); ++s) {
    Relation r(n, m);
    for (std::size_t c = 0; c < n * m; ++c)
      if (s >> c & 1) r.set(c / m, c % m, true);
    if (r.is_correspondence()) best = std::min(best, 0.5 * distortion(r, x, y));
  }
  return best;
}

Matrix cross_of(const GluedSpace& g) {
  Matrix c(g.n, g.m);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.m; ++j) c(i, j) = g.cross(i, j);
  return c;
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("zero cost") {
    const std::vector<double> mu{0.3, 0.7}, nu{0.5, 0.25, 0.25};
    const auto r = transport_lp(Matrix(2, 3), mu, nu);
    CHECK(r.value == 0.0);
    CHECK(r.coupling.is_coupling_of(mu, nu));
  }

  TEST_CASE("identical marginals with off-diagonal cost") {
    const std::vector<double> mu{0.2, 0.3, 0.5};
    const auto r = transport_lp(Matrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}), mu, mu);
    CHECK(r.value == 0.0);
    CHECK(r.coupling.pi == Coupling::identity(mu).pi);
  }

  TEST_CASE("half-half against quarter-three-quarters") {
    const auto r = transport_lp(Matrix::from_rows({{0, 1}, {1, 0}}), std::vector<double>{0.5, 0.5},
                                std::vector<double>{0.25, 0.75});
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-15));
  }

  TEST_CASE("matches vertex enumeration") {
    Rng rng(41);
    for (int t = 0; t < 150; ++t) {
      const std::size_t n = 1 + rng.below(3), m = 1 + rng.below(3);
      const auto mu = random_weights(rng, n), nu = random_weights(rng, m);
      Matrix cost(n, m);
      for (double& c : cost.data()) c = static_cast<double>(rng.below(5));
      const auto r = transport_lp(cost, mu, nu);
      CHECK(r.coupling.is_coupling_of(mu, nu));
      CHECK(r.value == doctest::Approx(transport_by_vertices(cost, mu, nu)).epsilon(1e-10));
    }
  }

  TEST_CASE("degenerate problems terminate") {
    // Equal uniform marginals make every basis degenerate.
    const std::vector<double> u(6, 1.0 / 6);
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
      Matrix cost(6, 6);
      for (double& c : cost.data()) c = static_cast<double>(rng.below(3));
      const auto r = transport_lp(cost, u, u);
      CHECK(r.coupling.is_coupling_of(u, u));
    }
  }

  TEST_CASE("marginal mismatch") {
    CHECK_THROWS_AS(transport_lp(Matrix(1, 1), std::vector<double>{1.0}, std::vector<double>{0.5}), Error);
  }
}

TEST_SUITE("compose couplings") {
  TEST_CASE("identity is neutral") {
    const std::vector<double> mu{0.25, 0.75}, nu{0.5, 0.2, 0.3};
    const auto pi = transport_lp(Matrix::from_rows({{0, 1, 2}, {2, 1, 0}}), mu, nu).coupling;
    const auto c = compose_couplings(Coupling::identity(mu), pi);
    for (std::size_t k = 0; k < pi.pi.data().size(); ++k)
      CHECK(c.pi.data()[k] == doctest::Approx(pi.pi.data()[k]).epsilon(1e-15));
  }

  TEST_CASE("products compose to a product") {
    const std::vector<double> a{0.5, 0.5}, b{0.1, 0.9}, c{0.2, 0.3, 0.5};
    const auto r = compose_couplings(Coupling::product(a, b), Coupling::product(b, c));
    const auto p = Coupling::product(a, c);
    for (std::size_t k = 0; k < p.pi.data().size(); ++k)
      CHECK(r.pi.data()[k] == doctest::Approx(p.pi.data()[k]).epsilon(1e-14));
  }

  TEST_CASE("mismatched middle marginal") {
    const std::vector<double> a{0.5, 0.5}, b{0.1, 0.9};
    try {
      compose_couplings(Coupling::product(a, a), Coupling::product(b, a));
      FAIL("expected MarginalMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kMarginalMismatch);
    }
  }
}

TEST_SUITE("prohorov") {
  TEST_CASE("equal measures") {
    const Matrix d = Matrix::from_rows({{0, 1}, {1, 0}});
    CHECK(prohorov(d, std::vector<double>{0.3, 0.7}, std::vector<double>{0.3, 0.7}) == 0.0);
  }

  TEST_CASE("point masses at distance one") {
    const Matrix d = Matrix::from_rows({{0, 1}, {1, 0}});
    CHECK(prohorov(d, std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  }

  TEST_CASE("partial displacement") {
    const Matrix d = Matrix::from_rows({{0, 1}, {1, 0}});
    CHECK(prohorov(d, std::vector<double>{1, 0}, std::vector<double>{0.7, 0.3}) == doctest::Approx(0.3).epsilon(1e-15));
  }

  TEST_CASE("matches the closed-set definition") {
    Rng rng(43);
    for (int t = 0; t < 120; ++t) {
      const std::size_t k = 1 + rng.below(5);
      Matrix d = random_space(rng, k, 4).dist();
      for (double& v : d.data()) v /= 4.0;  // distances in (0, 1]
      const auto mu = random_weights(rng, k), nu = random_weights(rng, k);
      CHECK(prohorov(d, mu, nu) == doctest::Approx(prohorov_by_subsets(d, mu, nu)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("relations and gluing") {
  TEST_CASE("distortion examples") {
    const auto x = fixture("exp25_x");
    CHECK(distortion(Relation::identity(2), x, x) == 0.0);
    CHECK(distortion(Relation::full(2, 1), x, fixture("one-point")) == 1.0);
    CHECK(distortion(Relation::full(2, 3), x, fixture("exp25_y")) == 1.0);
  }

  TEST_CASE("identity self-gluing reproduces the metric") {
    const auto x = fixture("exp62_x");
    const GluedSpace g = glue(x, x, Relation::identity(8));
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) CHECK(g.cross(i, j) == x.distance(i, j));
  }

  TEST_CASE("one point to one point") {
    const auto p = fixture("one-point");
    CHECK(glue(p, p, Relation::full(1, 1)).cross(0, 0) == 0.0);
  }

  TEST_CASE("distance one against distance two by matching") {
    const GluedSpace g = glue(two_points(1), two_points(2), Relation::identity(2));
    CHECK(g.cross(0, 0) == 0.5);
    CHECK(g.cross(1, 1) == 0.5);
    CHECK(g.cross(0, 1) == 1.5);
  }

  TEST_CASE("gluing properties on random relations") {
    Rng rng(44);
    for (int t = 0; t < 150; ++t) {
      const auto x = random_space(rng, 1 + rng.below(4)), y = random_space(rng, 1 + rng.below(4));
      Relation r(x.size(), y.size());
      while (r.empty())
        for (std::size_t i = 0; i < x.size(); ++i)
          for (std::size_t j = 0; j < y.size(); ++j) r.set(i, j, rng.below(2) == 1);
      const GluedSpace g = glue(x, y, r);
      const double half = 0.5 * distortion(r, x, y);
      const std::size_t N = x.size() + y.size();
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(g.dist(i, k) == x.distance(i, k));
      for (std::size_t j = 0; j < y.size(); ++j)
        for (std::size_t l = 0; l < y.size(); ++l) CHECK(g.dist(x.size() + j, x.size() + l) == y.distance(j, l));
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
          if (r(i, j)) CHECK(g.cross(i, j) == doctest::Approx(half).epsilon(1e-12));
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
          CHECK(g.dist(a, b) == g.dist(b, a));
          for (std::size_t c = 0; c < N; ++c) CHECK(g.dist(a, c) <= g.dist(a, b) + g.dist(b, c) + 1e-12);
        }
      if (r.is_correspondence()) {
        double hausdorff = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          double nearest = std::numeric_limits<double>::infinity();
          for (std::size_t j = 0; j < y.size(); ++j) nearest = std::min(nearest, g.cross(i, j));
          hausdorff = std::max(hausdorff, nearest);
        }
        for (std::size_t j = 0; j < y.size(); ++j) {
          double nearest = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < x.size(); ++i) nearest = std::min(nearest, g.cross(i, j));
          hausdorff = std::max(hausdorff, nearest);
        }
        CHECK(hausdorff == doctest::Approx(half).epsilon(1e-12));
      }
    }
  }
}

TEST_SUITE("gromov-hausdorff") {
  TEST_CASE("examples") {
    const auto x = fixture("exp62_y");
    CHECK(gromov_hausdorff(x, x).interval.upper == 0.0);
    for (double d : {0.5, 3.0}) {
      const auto r = gromov_hausdorff(fixture("one-point"), two_points(d));
      CHECK(r.interval.exact());
      CHECK(r.interval.upper == d / 2);
    }
    const auto r = gromov_hausdorff(two_points(1), two_points(3));
    CHECK(r.interval.exact());
    CHECK(r.interval.upper == 1.0);
  }

  TEST_CASE("matches correspondence enumeration") {
    Rng rng(45);
    for (int t = 0; t < 100; ++t) {
      const auto x = random_space(rng, 1 + rng.below(4)), y = random_space(rng, 1 + rng.below(4));
      const auto r = gromov_hausdorff(x, y);
      CHECK(r.interval.exact());
      CHECK(r.interval.upper == doctest::Approx(gh_by_correspondences(x, y)).epsilon(1e-12));
      CHECK(0.5 * distortion(*r.relation, x, y) == doctest::Approx(r.interval.upper).epsilon(1e-12));
    }
  }

  TEST_CASE("large pairs fall back to certified bounds") {
    const auto r = gromov_hausdorff(fixture("exp62_x"), fixture("exp62_y"));
    CHECK(r.interval.lower <= r.interval.upper);
    CHECK(r.relation->is_correspondence());
    CHECK(0.5 * distortion(*r.relation, fixture("exp62_x"), fixture("exp62_y")) == r.interval.upper);
  }
}

TEST_SUITE("gromov-prohorov and gromov-wasserstein") {
  TEST_CASE("identical spaces") {
    const auto x = fixture("exp25_y");
    const auto r = gromov_prohorov(x, x);
    CHECK(r.interval.lower == 0.0);
    CHECK(r.interval.upper == 0.0);
    CHECK(gromov_wasserstein(x, x).interval.upper == 0.0);
  }

  TEST_CASE("one point against two far points") {
    for (int n = 1; n <= 3; ++n) {
      const auto r = gromov_prohorov(fixture("one-point"), fixture("exp212i:" + std::to_string(n)));
      CHECK(r.interval.exact());
      CHECK(r.interval.upper == 0.5);
    }
    const auto w = gromov_wasserstein(fixture("one-point"), two_points(2));
    CHECK(w.interval.exact());
    CHECK(w.interval.upper == 0.5);
  }

  TEST_CASE("equidistant sequence is half apart") {
    for (int n = 1; n <= 2; ++n) {
      const auto r = gromov_prohorov(fixture("exp212ii:" + std::to_string(n)),
                                     fixture("exp212ii:" + std::to_string(n + 1)));
      CHECK(r.interval.exact());
      CHECK(r.interval.upper == 0.5);
    }
  }

  TEST_CASE("clique enumeration matches all-relation brute force") {
    Rng rng(46);
    for (int t = 0; t < 80; ++t) {
      const auto x = random_space(rng, 1 + rng.below(3)), y = random_space(rng, 1 + rng.below(4));
      const auto gpr = gromov_prohorov(x, y);
      const auto gw = gromov_wasserstein(x, y);
      if (x == y) continue;
      REQUIRE(gpr.interval.exact());
      REQUIRE(gw.interval.exact());
      const double bp = min_over_all_relations(x, y, [&](const Relation& r) { return prohorov_glued(x, y, r); });
      const double bw = min_over_all_relations(x, y, [&](const Relation& r) {
        return truncated_wasserstein_bipartite(cross_of(glue(x, y, r)), x.weights(), y.weights()).value;
      });
      CHECK(gpr.interval.upper == doctest::Approx(bp).epsilon(1e-12));
      CHECK(gw.interval.upper == doctest::Approx(bw).epsilon(1e-12));
      CHECK(prohorov_glued(x, y, *gpr.relation) == doctest::Approx(gpr.interval.upper).epsilon(1e-12));
    }
  }

  TEST_CASE("heuristic family beyond the enumeration budget") {
    MetricOptions opts;
    opts.relation_budget = 10;
    const auto x = fixture("exp62_x"), y = fixture("exp62_y");
    const auto r = gromov_prohorov(x, y, opts);
    CHECK_FALSE(r.interval.exact());
    CHECK(r.interval.lower <= r.interval.upper);
    CHECK(prohorov_glued(x, y, *r.relation) == doctest::Approx(r.interval.upper).epsilon(1e-12));
    const auto w = gromov_wasserstein(x, y, opts);
    CHECK(w.interval.lower <= w.interval.upper);
  }

  TEST_CASE("wasserstein can exceed prohorov, but not twice over") {
    // One point against three equal masses with distances 3, 3, 1. The best
    // gluing puts the close pair at 1/2 and the far point at 5/2: Prohorov
    // 1/2, truncated transport cost (1/2 + 1/2 + 1)/3 = 2/3, and no gluing
    // brings the transport cost lower.
    const auto x = fixture("one-point");
    const auto y = FiniteMMSpace::uniform(Matrix::from_rows({{0, 3, 3}, {3, 0, 1}, {3, 1, 0}}));
    const auto gpr = gromov_prohorov(x, y).interval;
    const auto gw = gromov_wasserstein(x, y).interval;
    REQUIRE(gpr.exact());
    REQUIRE(gw.exact());
    CHECK(gpr.upper == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gw.upper == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    Rng rng(48);
    for (int t = 0; t < 100; ++t) {
      const auto a = random_space(rng, 1 + rng.below(3)), b = random_space(rng, 1 + rng.below(3));
      const double g = gromov_prohorov(a, b).interval.upper;
      const double w = gromov_wasserstein(a, b).interval.upper;
      CHECK(w <= 2 * g + 1e-9);
      CHECK(g * g <= w + 1e-9);
    }
  }

  TEST_CASE("symmetry") {
    Rng rng(47);
    for (int t = 0; t < 40; ++t) {
      const auto x = random_space(rng, 1 + rng.below(3)), y = random_space(rng, 1 + rng.below(3));
      for (auto f : {&gromov_prohorov, &gromov_wasserstein, &gromov_hausdorff, &eurandom, &mod_eurandom}) {
        const auto a = f(x, y, {}), b = f(y, x, {});
        CHECK(a.interval.lower == b.interval.lower);
        CHECK(a.interval.upper == b.interval.upper);
      }
    }
  }
}

TEST_SUITE("eurandom") {
  TEST_CASE("identical spaces") {
    const auto x = fixture("exp62_x");
    CHECK(eurandom(x, x).interval.upper == 0.0);
    CHECK(mod_eurandom(x, x).interval.upper == 0.0);
    CHECK(mod_eurandom(fixture("one-point"), fixture("one-point")).interval.upper == 0.0);
  }

  TEST_CASE("two-point against three-point fixture") {
    // All distances are 1, so the bad-pair mass is 1 - 2 sum pi_ij^2; the
    // best vertex puts mass 1/2 on the heaviest point, leaving
    // sum pi^2 = 1/4 + (c - 1/2)^2 + b^2 + a^2.
    const double s = std::sqrt(3.0);
    const double a = (2 - s) / 6, b = 1.0 / 3, c = (2 + s) / 6;
    const double expected = 1 - 2 * (0.25 + (c - 0.5) * (c - 0.5) + b * b + a * a);
    const auto r = eurandom(fixture("exp25_x"), fixture("exp25_y"));
    CHECK(r.interval.exact());
    CHECK(r.interval.lower == 0.0 + r.interval.upper);
    CHECK(r.interval.upper == doctest::Approx(expected).epsilon(1e-12));
    MetricOptions bounds_only;
    bounds_only.exact_cells = 0;
    CHECK(eurandom(fixture("exp25_x"), fixture("exp25_y"), bounds_only).interval.lower == 0.0);
  }

  TEST_CASE("equidistant sequence bound via the product coupling") {
    for (int n = 2; n <= 3; ++n) {
      const auto x = fixture("exp212ii:" + std::to_string(n));
      const auto y = fixture("exp212ii:" + std::to_string(n + 1));
      const double bound = std::ldexp(1.0, -(n - 1));
      CHECK(ky_fan_level(x, y, Coupling::product(x.weights(), y.weights())) <= bound);
      CHECK(eurandom(x, y).interval.upper <= bound);
    }
  }

  TEST_CASE("exact solver agrees with random search") {
    Rng rng(48);
    for (int t = 0; t < 25; ++t) {
      const std::size_t n = 1 + rng.below(3), m = 1 + rng.below(3);
      const auto x = random_space(rng, n), y = random_space(rng, m);
      const auto r = eurandom(x, y);
      REQUIRE(r.interval.exact());
      Rng search(1000 + static_cast<std::uint64_t>(t));
      const double found = eurandom_random_search(x, y, 20000, search);
      CHECK(r.interval.upper <= found + 1e-9);
      CHECK(found <= r.interval.upper + 1e-6);
      CHECK(ky_fan_level(x, y, *r.coupling) == doctest::Approx(r.interval.upper).epsilon(1e-12));
    }
  }

  TEST_CASE("zero exactly for isomorphic spaces") {
    Rng rng(49);
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 1 + rng.below(3);
      const auto x = random_space(rng, n);
      // Permuted copy.
      std::vector<std::size_t> p(n);
      std::iota(p.begin(), p.end(), 0);
      for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
      Matrix d(n, n);
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = x.weight(p[i]);
        for (std::size_t j = 0; j < n; ++j) d(i, j) = x.distance(p[i], p[j]);
      }
      const auto y = FiniteMMSpace::unlabelled(d, w);
      CHECK(eurandom(x, y).interval.upper == 0.0);
      const auto z = random_space(rng, n);
      CHECK((eurandom(x, z).interval.upper == 0.0) == are_isomorphic(x, z));
    }
  }

  TEST_CASE("modified eurandom exact against Frank-Wolfe restarts") {
    Rng rng(50);
    for (int t = 0; t < 40; ++t) {
      const auto x = random_space(rng, 1 + rng.below(3)), y = random_space(rng, 1 + rng.below(3));
      const auto r = mod_eurandom(x, y);
      REQUIRE(r.interval.exact());
      CHECK(mod_eurandom_objective(x, y, *r.coupling) == doctest::Approx(r.interval.upper).epsilon(1e-12));
      MetricOptions fw;
      fw.exact_cells = 0;
      const auto u = mod_eurandom(x, y, fw);
      CHECK(u.interval.upper >= r.interval.upper - 1e-9);
      CHECK(u.interval.lower <= r.interval.upper + 1e-9);
    }
  }

  TEST_CASE("distance one against distance two") {
    const auto x = two_points(1), y = two_points(2);
    const auto m = mod_eurandom(x, y), e = eurandom(x, y);
    REQUIRE(m.interval.exact());
    // Matching coupling: |1 - 2| = 1 on the half of pairs that differ.
    CHECK(m.interval.upper == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.interval.upper <= e.interval.upper + 1e-9);
  }

  TEST_CASE("bounds-only regime is consistent") {
    const auto x = fixture("exp62_x"), y = fixture("exp62_y");
    const auto r = eurandom(x, y);
    CHECK(r.interval.lower <= r.interval.upper);
    CHECK(ky_fan_level(x, y, *r.coupling) == doctest::Approx(r.interval.upper).epsilon(1e-12));
  }
}

TEST_SUITE("quadratic solvers") {
  TEST_CASE("exact face enumeration is below every Frank-Wolfe run") {
    Rng rng(51);
    for (int t = 0; t < 30; ++t) {
      const std::size_t n = 1 + rng.below(3), m = 1 + rng.below(3), cells = n * m;
      const auto mu = random_weights(rng, n), nu = random_weights(rng, m);
      Matrix q(cells, cells);
      for (std::size_t a = 0; a < cells; ++a)
        for (std::size_t b = a; b < cells; ++b) q(a, b) = q(b, a) = static_cast<double>(rng.below(5)) - 1.0;
      const auto exact = minimize_quadratic_exact(q, mu, nu, 9);
      REQUIRE(exact);
      CHECK(exact->coupling.is_coupling_of(mu, nu));
      CHECK(quadratic_value(q, exact->coupling) == doctest::Approx(exact->value).epsilon(1e-12));
      for (auto rule : {StepRule::kOpenLoop, StepRule::kLineSearch}) {
        const auto fw = frank_wolfe(q, mu, nu, Coupling::product(mu, nu), 200, rule);
        CHECK(fw.value >= exact->value - 1e-9);
      }
    }
  }

  TEST_CASE("cell guard") {
    const std::vector<double> u(4, 0.25);
    CHECK_FALSE(minimize_quadratic_exact(Matrix(16, 16), u, u, 9).has_value());
  }
}
