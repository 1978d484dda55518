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

#include "mmspace/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "mmspace/error.hpp"
#include "mmspace/functionals.hpp"
#include "mmspace/quadratic.hpp"

namespace mmspace {

// ---------------------------------------------------------------------------
// Relations and witnesses

Relation Relation::full(std::size_t rows, std::size_t cols) {
  Relation r(rows, cols);
  std::fill(r.bits_.begin(), r.bits_.end(), 1);
  return r;
}

Relation Relation::identity(std::size_t n) {
  Relation r(n, n);
  for (std::size_t i = 0; i < n; ++i) r.set(i, i, true);
  return r;
}

Relation Relation::support_of(const Coupling& pi, double threshold) {
  Relation r(pi.rows(), pi.cols());
  for (std::size_t i = 0; i < pi.rows(); ++i)
    for (std::size_t j = 0; j < pi.cols(); ++j)
      if (pi(i, j) > threshold) r.set(i, j, true);
  return r;
}

std::size_t Relation::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

bool Relation::is_correspondence() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < cols_ && !any; ++j) any = (*this)(i, j);
    if (!any) return false;
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < rows_ && !any; ++i) any = (*this)(i, j);
    if (!any) return false;
  }
  return true;
}

Relation Relation::transposed() const {
  Relation t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.set(j, i, (*this)(i, j));
  return t;
}

std::string to_string(const Witness& w) {
  const char* kind = "";
  switch (w.kind) {
    case Witness::Kind::kExact: kind = "exact"; break;
    case Witness::Kind::kCoupling: kind = "coupling"; break;
    case Witness::Kind::kRelation: kind = "relation"; break;
    case Witness::Kind::kInequality: kind = "inequality"; break;
  }
  return w.detail.empty() ? kind : std::string(kind) + ": " + w.detail;
}

namespace {

// ---------------------------------------------------------------------------
// Threshold scans

// inf{eps > 0 : M(eps) <= eps} (or < eps when strict) for a step function
// equal to masses(k) on (levels[k-1], levels[k]] and 0 beyond the last
// level. masses must be non-increasing in k; evaluated by bisection.
// `chosen` receives the index of the interval attaining the infimum, or
// levels.size() when it is the last level itself.
template <class MassFn>
double threshold_infimum(const std::vector<double>& levels, MassFn&& masses,
                         bool strict, std::size_t* chosen = nullptr) {
  auto ok = [&](std::size_t k) {
    const double mass = masses(k);
    return strict ? mass < levels[k] : mass <= levels[k];
  };
  std::size_t lo = 0, hi = levels.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (chosen) *chosen = lo;
  if (lo == levels.size()) return levels.empty() ? 0.0 : levels.back();
  const double below = lo == 0 ? 0.0 : levels[lo - 1];
  return std::max(below, masses(lo));
}

std::vector<double> distinct_positive(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  values.erase(values.begin(),
               std::upper_bound(values.begin(), values.end(), 0.0));
  return values;
}

bool should_swap(const FiniteMMSpace& x, const FiniteMMSpace& y) {
  if (x.size() != y.size()) return x.size() > y.size();
  const auto dx = x.dist().data(), dy = y.dist().data();
  if (!std::equal(dx.begin(), dx.end(), dy.begin()))
    return std::lexicographical_compare(dy.begin(), dy.end(), dx.begin(), dx.end());
  const auto wx = x.weights(), wy = y.weights();
  return std::lexicographical_compare(wy.begin(), wy.end(), wx.begin(), wx.end());
}

MetricResult transposed(MetricResult r) {
  if (r.coupling) r.coupling->pi = r.coupling->pi.transposed();
  if (r.relation) r.relation = r.relation->transposed();
  return r;
}

// Evaluates f on the canonically ordered pair so that f(X,Y) and f(Y,X)
// agree exactly.
template <class Fn>
MetricResult symmetrized(const FiniteMMSpace& x, const FiniteMMSpace& y, Fn&& f) {
  if (should_swap(x, y)) return transposed(f(y, x));
  return f(x, y);
}

MetricResult zero_result(const FiniteMMSpace& x, bool with_coupling) {
  MetricResult r;
  r.interval = {0.0, 0.0, {Witness::Kind::kExact, "identical spaces"},
                {Witness::Kind::kExact, "identical spaces"}};
  if (with_coupling) {
    r.coupling = Coupling::identity(x.weights());
  } else {
    r.relation = Relation::identity(x.size());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pair geometry: |r_X(x,x') - r_Y(y,y')| for every pair of cells.

struct PairGeometry {
  std::size_t n, m, cells;
  Matrix delta;
  std::vector<double> levels;  // distinct positive values of delta

  PairGeometry(const FiniteMMSpace& x, const FiniteMMSpace& y)
      : n(x.size()), m(y.size()), cells(n * m), delta(cells, cells) {
    std::vector<double> values;
    values.reserve(cells * cells);
    for (std::size_t a = 0; a < cells; ++a)
      for (std::size_t b = 0; b < cells; ++b) {
        const double d = std::abs(x.distance(a / m, b / m) - y.distance(a % m, b % m));
        delta(a, b) = d;
        values.push_back(d);
      }
    levels = distinct_positive(std::move(values));
  }

  Matrix indicator_at_least(double t) const {
    Matrix q(cells, cells);
    for (std::size_t a = 0; a < cells; ++a)
      for (std::size_t b = 0; b < cells; ++b) q(a, b) = delta(a, b) >= t ? 1.0 : 0.0;
    return q;
  }

  Matrix truncated() const {
    Matrix q(cells, cells);
    for (std::size_t a = 0; a < cells; ++a)
      for (std::size_t b = 0; b < cells; ++b) q(a, b) = std::min(delta(a, b), 1.0);
    return q;
  }
};

double ky_fan_from_geometry(const PairGeometry& g, const Coupling& pi) {
  std::vector<std::pair<double, double>> masses;
  const auto p = pi.pi.data();
  for (std::size_t a = 0; a < g.cells; ++a) {
    if (p[a] <= 0.0) continue;
    for (std::size_t b = 0; b < g.cells; ++b)
      if (p[b] > 0.0 && g.delta(a, b) > 0.0) masses.emplace_back(g.delta(a, b), p[a] * p[b]);
  }
  std::sort(masses.begin(), masses.end());
  std::vector<double> levels, tail;
  for (const auto& [d, w] : masses)
    if (levels.empty() || levels.back() != d) levels.push_back(d);
  tail.assign(levels.size(), 0.0);
  for (std::size_t i = masses.size(), k = levels.size(); i-- > 0;) {
    while (levels[k - 1] != masses[i].first) --k;
    tail[k - 1] += masses[i].second;
  }
  for (std::size_t k = levels.size(); k-- > 1;) tail[k - 1] += tail[k];
  return threshold_infimum(levels, [&](std::size_t k) { return tail[k]; }, true);
}

// Random vertex of the coupling polytope: northwest corner rule on randomly
// permuted rows and columns.
Coupling random_vertex(std::span<const double> mu, std::span<const double> nu,
                       Rng& rng) {
  std::vector<std::size_t> rows(mu.size()), cols(nu.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
  for (std::size_t j = cols.size(); j > 1; --j) std::swap(cols[j - 1], cols[rng.below(j)]);
  std::vector<double> a(mu.begin(), mu.end()), b(nu.begin(), nu.end());
  Matrix pi(mu.size(), nu.size());
  std::size_t i = 0, j = 0;
  while (i < rows.size() && j < cols.size()) {
    const double x = std::min(a[rows[i]], b[cols[j]]);
    pi(rows[i], cols[j]) += x;
    a[rows[i]] -= x;
    b[cols[j]] -= x;
    if (i + 1 < rows.size() && (a[rows[i]] <= b[cols[j]] || j + 1 == cols.size())) {
      ++i;
    } else {
      ++j;
    }
  }
  return {std::move(pi)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Prohorov, Wasserstein, distortion, gluing

ProhorovResult prohorov_bipartite(const Matrix& cross, std::span<const double> mu,
                                  std::span<const double> nu) {
  std::vector<double> values;
  for (std::size_t i = 0; i < cross.rows(); ++i)
    for (std::size_t j = 0; j < cross.cols(); ++j)
      if (mu[i] > 0.0 && nu[j] > 0.0) values.push_back(cross(i, j));
  const std::vector<double> levels = distinct_positive(std::move(values));
  std::map<std::size_t, TransportResult> solved;
  auto bad_mass = [&](std::size_t k) {
    auto it = solved.find(k);
    if (it == solved.end()) {
      Matrix cost(cross.rows(), cross.cols());
      for (std::size_t i = 0; i < cross.rows(); ++i)
        for (std::size_t j = 0; j < cross.cols(); ++j)
          cost(i, j) = cross(i, j) >= levels[k] ? 1.0 : 0.0;
      it = solved.emplace(k, transport_lp(cost, mu, nu)).first;
    }
    return it->second.value;
  };
  std::size_t chosen = 0;
  const double value = threshold_infimum(levels, bad_mass, false, &chosen);
  if (chosen < levels.size()) return {value, solved.at(chosen).coupling};
  return {value, Coupling::product(mu, nu)};
}

double prohorov(const Matrix& dist, std::span<const double> mu,
                std::span<const double> nu) {
  if (dist.rows() != dist.cols() || dist.rows() != mu.size() || mu.size() != nu.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "DimensionMismatch: prohorov needs a square metric and two "
                "weight vectors on the same points");
  }
  return prohorov_bipartite(dist, mu, nu).value;
}

TransportResult truncated_wasserstein_bipartite(const Matrix& cross,
                                                std::span<const double> mu,
                                                std::span<const double> nu) {
  Matrix cost(cross.rows(), cross.cols());
  for (std::size_t i = 0; i < cross.rows(); ++i)
    for (std::size_t j = 0; j < cross.cols(); ++j) cost(i, j) = std::min(cross(i, j), 1.0);
  return transport_lp(cost, mu, nu);
}

double distortion(const Relation& r, const FiniteMMSpace& x,
                  const FiniteMMSpace& y) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j)
      if (r(i, j)) pairs.emplace_back(i, j);
  if (pairs.empty()) {
    throw Error(ErrorKind::kPreconditionFailed,
                "PreconditionFailed: distortion of an empty relation");
  }
  double dis = 0.0;
  for (const auto& [a, b] : pairs)
    for (const auto& [c, d] : pairs)
      dis = std::max(dis, std::abs(x.distance(a, c) - y.distance(b, d)));
  return dis;
}

GluedSpace glue(const FiniteMMSpace& x, const FiniteMMSpace& y,
                const Relation& r) {
  const std::size_t n = x.size(), m = y.size();
  if (r.rows() != n || r.cols() != m) {
    throw Error(ErrorKind::kDimensionMismatch,
                "DimensionMismatch: relation shape does not match the spaces");
  }
  const double half = 0.5 * distortion(r, x, y);
  GluedSpace g;
  g.n = n;
  g.m = m;
  g.relation = r;
  g.dist = Matrix(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) g.dist(i, k) = x.distance(i, k);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < m; ++l) g.dist(n + j, n + l) = y.distance(j, l);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (r(i, j)) pairs.emplace_back(i, j);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [a, b] : pairs)
        best = std::min(best, x.distance(i, a) + half + y.distance(b, j));
      g.dist(i, n + j) = best;
      g.dist(n + j, i) = best;
    }
  }
  return g;
}

namespace {

Matrix cross_block(const GluedSpace& g) {
  Matrix c(g.n, g.m);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.m; ++j) c(i, j) = g.cross(i, j);
  return c;
}

}  // namespace

double prohorov_glued(const FiniteMMSpace& x, const FiniteMMSpace& y,
                      const Relation& r) {
  const GluedSpace g = glue(x, y, r);
  return prohorov_bipartite(cross_block(g), x.weights(), y.weights()).value;
}

double ky_fan_level(const FiniteMMSpace& x, const FiniteMMSpace& y,
                    const Coupling& pi) {
  return ky_fan_from_geometry(PairGeometry(x, y), pi);
}

double mod_eurandom_objective(const FiniteMMSpace& x, const FiniteMMSpace& y,
                              const Coupling& pi) {
  const std::size_t m = y.size();
  const auto p = pi.pi.data();
  double total = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] == 0.0) continue;
    for (std::size_t b = 0; b < p.size(); ++b) {
      if (p[b] == 0.0) continue;
      const double d = std::abs(x.distance(a / m, b / m) - y.distance(a % m, b % m));
      total += p[a] * p[b] * std::min(d, 1.0);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Relation enumeration

std::optional<RelationMinimum> minimize_over_relations(
    const FiniteMMSpace& x, const FiniteMMSpace& y,
    const RelationObjective& objective, std::size_t budget) {
  const std::size_t n = x.size(), m = y.size(), cells = n * m;
  if (cells > 64) return std::nullopt;
  const PairGeometry geom(x, y);
  std::vector<double> levels = geom.levels;
  levels.insert(levels.begin(), 0.0);

  using Mask = std::uint64_t;
  const Mask all = cells == 64 ? ~Mask{0} : (Mask{1} << cells) - 1;
  std::vector<Mask> adj(cells);
  std::optional<RelationMinimum> best;
  std::size_t visited = 0;
  bool exhausted = false;

  auto evaluate = [&](Mask clique) {
    Relation r(n, m);
    for (std::size_t c = 0; c < cells; ++c)
      if (clique >> c & 1) r.set(c / m, c % m, true);
    const double v = objective(r, glue(x, y, r));
    if (!best || v < best->value) best = RelationMinimum{std::move(r), v};
  };

  // Bron-Kerbosch with pivoting over bit masks.
  std::function<void(Mask, Mask, Mask)> expand = [&](Mask r, Mask p, Mask q) {
    if (exhausted) return;
    if (p == 0 && q == 0) {
      if (++visited > budget) {
        exhausted = true;
        return;
      }
      evaluate(r);
      return;
    }
    const Mask pq = p | q;
    std::size_t pivot = static_cast<std::size_t>(std::countr_zero(pq));
    int best_deg = -1;
    for (Mask s = pq; s; s &= s - 1) {
      const auto u = static_cast<std::size_t>(std::countr_zero(s));
      const int deg = std::popcount(p & adj[u]);
      if (deg > best_deg) {
        best_deg = deg;
        pivot = u;
      }
    }
    for (Mask s = p & ~adj[pivot]; s; s &= s - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(s));
      const Mask bit = Mask{1} << v;
      expand(r | bit, p & adj[v], q & adj[v]);
      p &= ~bit;
      q |= bit;
      if (exhausted) return;
    }
  };

  for (double level : levels) {
    for (std::size_t a = 0; a < cells; ++a) {
      Mask nb = 0;
      for (std::size_t b = 0; b < cells; ++b)
        if (a != b && geom.delta(a, b) <= level) nb |= Mask{1} << b;
      adj[a] = nb;
    }
    expand(0, all, 0);
    if (exhausted) return std::nullopt;
  }
  return best;
}

namespace {

// Relations tried when exhaustive enumeration is out of budget.
std::vector<Relation> heuristic_relations(const FiniteMMSpace& x,
                                          const FiniteMMSpace& y,
                                          const MetricOptions& opts) {
  const std::size_t n = x.size(), m = y.size();
  std::vector<Relation> out;
  out.push_back(Relation::full(n, m));

  // Weight-greedy matching: heaviest with heaviest.
  std::vector<std::size_t> ox(n), oy(m);
  std::iota(ox.begin(), ox.end(), 0);
  std::iota(oy.begin(), oy.end(), 0);
  std::stable_sort(ox.begin(), ox.end(), [&](auto a, auto b) { return x.weight(a) > x.weight(b); });
  std::stable_sort(oy.begin(), oy.end(), [&](auto a, auto b) { return y.weight(a) > y.weight(b); });
  {
    Relation r(n, m);
    for (std::size_t k = 0; k < std::min(n, m); ++k) r.set(ox[k], oy[k], true);
    out.push_back(r);
    // Extended to a correspondence by cycling the shorter side.
    for (std::size_t k = std::min(n, m); k < std::max(n, m); ++k) {
      if (n > m) {
        r.set(ox[k], oy[k % m], true);
      } else {
        r.set(ox[k % n], oy[k], true);
      }
    }
    out.push_back(r);
  }

  // Supports of optimal couplings for the distance-profile mismatch cost.
  Matrix profile_cost(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const Empirical1D px = distance_profile(x, i);
    for (std::size_t j = 0; j < m; ++j) {
      const Empirical1D py = distance_profile(y, j);
      std::vector<double> grid;
      for (const Atom& a : px.atoms()) grid.push_back(a.value);
      for (const Atom& a : py.atoms()) grid.push_back(a.value);
      std::sort(grid.begin(), grid.end());
      double w1 = 0.0;
      for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double t = grid[k + 1];
        w1 += std::abs(px.mass_below(t) - py.mass_below(t)) * (grid[k + 1] - grid[k]);
      }
      profile_cost(i, j) = w1 + std::abs(x.weight(i) - y.weight(j));
    }
  }
  out.push_back(Relation::support_of(transport_lp(profile_cost, x.weights(), y.weights()).coupling));

  if (n * m <= 64) {
    const MetricResult gh = gromov_hausdorff(x, y, opts);
    if (gh.relation) out.push_back(*gh.relation);
  }
  return out;
}

struct FamilyResult {
  Relation relation;
  double value;
  bool exhaustive;
};

FamilyResult minimize_relation_family(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                      const RelationObjective& objective,
                                      const MetricOptions& opts) {
  if (auto exact = minimize_over_relations(x, y, objective, opts.relation_budget))
    return {std::move(exact->relation), exact->value, true};

  std::optional<FamilyResult> best;
  for (const Relation& r : heuristic_relations(x, y, opts)) {
    if (r.empty()) continue;
    const double v = objective(r, glue(x, y, r));
    if (!best || v < best->value) best = FamilyResult{r, v, false};
  }
  // Single-bit flips from the incumbent until no flip improves.
  const std::size_t n = x.size(), m = y.size();
  const std::size_t max_passes = 3;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t c = 0; c < n * m; ++c) {
      Relation r = best->relation;
      r.flip(c / m, c % m);
      if (r.empty()) continue;
      const double v = objective(r, glue(x, y, r));
      if (v < best->value) {
        best = FamilyResult{std::move(r), v, false};
        improved = true;
      }
    }
    if (!improved) break;
  }
  return *best;
}

double prohorov_objective(const FiniteMMSpace& x, const FiniteMMSpace& y,
                          const GluedSpace& g) {
  return prohorov_bipartite(cross_block(g), x.weights(), y.weights()).value;
}

double wasserstein_objective(const FiniteMMSpace& x, const FiniteMMSpace& y,
                             const GluedSpace& g) {
  return truncated_wasserstein_bipartite(cross_block(g), x.weights(), y.weights()).value;
}

// Prohorov distance between the two distance distributions on the line.
double distance_distribution_prohorov(const FiniteMMSpace& x, const FiniteMMSpace& y) {
  const Empirical1D wx = distance_distribution(x), wy = distance_distribution(y);
  std::vector<double> pts;
  for (const Atom& a : wx.atoms()) pts.push_back(a.value);
  for (const Atom& a : wy.atoms()) pts.push_back(a.value);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> mu(pts.size(), 0.0), nu(pts.size(), 0.0);
  for (const Atom& a : wx.atoms())
    mu[std::lower_bound(pts.begin(), pts.end(), a.value) - pts.begin()] += a.mass;
  for (const Atom& a : wy.atoms())
    nu[std::lower_bound(pts.begin(), pts.end(), a.value) - pts.begin()] += a.mass;
  Matrix d(pts.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) d(i, j) = std::abs(pts[i] - pts[j]);
  return prohorov(d, mu, nu);
}

// ---------------------------------------------------------------------------
// Gromov-Hausdorff

struct GhSearch {
  const PairGeometry& g;
  std::size_t n, m;
  double best;
  std::uint64_t best_mask;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> row_count, col_count;

  void run(std::size_t c, double dis, std::uint64_t mask) {
    if (dis >= best) return;
    if (c == n * m) {
      best = dis;
      best_mask = mask;
      return;
    }
    const std::size_t i = c / m, j = c % m;
    // Last chance to cover row i (at its last column) or column j (last row).
    const bool forced = (j == m - 1 && row_count[i] == 0) || (i == n - 1 && col_count[j] == 0);
    double with = dis;
    for (std::size_t other : chosen) with = std::max(with, g.delta(c, other));
    ++row_count[i];
    ++col_count[j];
    chosen.push_back(c);
    run(c + 1, with, mask | std::uint64_t{1} << c);
    chosen.pop_back();
    --row_count[i];
    --col_count[j];
    if (!forced) run(c + 1, dis, mask);
  }
};

Relation local_search_correspondence(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                     Relation r) {
  double current = distortion(r, x, y);
  while (true) {
    std::optional<Relation> next;
    double next_dis = current;
    for (std::size_t i = 0; i < r.rows(); ++i)
      for (std::size_t j = 0; j < r.cols(); ++j) {
        if (!r(i, j)) continue;
        Relation t = r;
        t.set(i, j, false);
        if (!t.is_correspondence()) continue;
        const double d = distortion(t, x, y);
        if (d < next_dis) {
          next_dis = d;
          next = std::move(t);
        }
      }
    if (!next) return r;
    r = std::move(*next);
    current = next_dis;
  }
}

MetricResult gh_oriented(const FiniteMMSpace& x, const FiniteMMSpace& y,
                         const MetricOptions& opts) {
  if (x == y) return zero_result(x, false);
  const std::size_t n = x.size(), m = y.size();
  MetricResult out;
  if (n * m <= std::min<std::size_t>(opts.gh_exact_cells, 63)) {
    const PairGeometry geom(x, y);
    const Relation full = Relation::full(n, m);
    // Start just above the full relation's distortion so the search always
    // records a correspondence.
    GhSearch search{geom, n, m,
                    std::nextafter(distortion(full, x, y), std::numeric_limits<double>::infinity()),
                    0, {}, std::vector<std::size_t>(n, 0), std::vector<std::size_t>(m, 0)};
    search.run(0, 0.0, 0);
    Relation r(n, m);
    for (std::size_t c = 0; c < n * m; ++c)
      if (search.best_mask >> c & 1) r.set(c / m, c % m, true);
    const double value = 0.5 * distortion(r, x, y);
    out.interval = {value, value, {Witness::Kind::kExact, "correspondence enumeration"},
                    {Witness::Kind::kExact, "correspondence enumeration"}};
    out.relation = std::move(r);
    out.objective = value;
    return out;
  }
  // Greedy pruning from the full relation and from nearest-profile matches.
  std::vector<Relation> starts{Relation::full(n, m)};
  Relation nearest(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m; ++j)
      if (std::abs(x.weight(i) - y.weight(j)) < std::abs(x.weight(i) - y.weight(best))) best = j;
    nearest.set(i, best, true);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(x.weight(i) - y.weight(j)) < std::abs(x.weight(best) - y.weight(j))) best = i;
    nearest.set(best, j, true);
  }
  starts.push_back(nearest);
  std::optional<Relation> best;
  double best_dis = std::numeric_limits<double>::infinity();
  for (Relation& s : starts) {
    Relation r = local_search_correspondence(x, y, std::move(s));
    const double d = distortion(r, x, y);
    if (d < best_dis) {
      best_dis = d;
      best = std::move(r);
    }
  }
  out.interval = {0.0, 0.5 * best_dis, {Witness::Kind::kInequality, "trivial lower bound 0"},
                  {Witness::Kind::kRelation, "local-search correspondence"}};
  out.relation = std::move(best);
  out.objective = 0.5 * best_dis;
  return out;
}

// ---------------------------------------------------------------------------
// Eurandom

struct EurandomCore {
  double value;
  Coupling coupling;
  bool exact;
};

EurandomCore eurandom_exact(const PairGeometry& g, const FiniteMMSpace& x,
                            const FiniteMMSpace& y, std::size_t max_cells) {
  std::map<std::size_t, QuadraticResult> solved;
  bool failed = false;
  auto q = [&](std::size_t k) {
    auto it = solved.find(k);
    if (it == solved.end()) {
      auto r = minimize_quadratic_exact(g.indicator_at_least(g.levels[k]), x.weights(),
                                        y.weights(), max_cells);
      if (!r) {
        failed = true;
        return std::numeric_limits<double>::infinity();
      }
      it = solved.emplace(k, std::move(*r)).first;
    }
    return it->second.value;
  };
  std::size_t chosen = 0;
  const double value = threshold_infimum(g.levels, q, true, &chosen);
  if (failed) return {0.0, Coupling::product(x.weights(), y.weights()), false};
  Coupling pi = chosen < g.levels.size() ? solved.at(chosen).coupling
                                         : Coupling::product(x.weights(), y.weights());
  return {value, std::move(pi), true};
}

EurandomCore eurandom_upper(const PairGeometry& g, const FiniteMMSpace& x,
                            const FiniteMMSpace& y, const MetricOptions& opts) {
  const auto mu = x.weights(), nu = y.weights();
  const std::size_t n = x.size(), m = y.size();
  std::vector<Coupling> candidates{Coupling::product(mu, nu)};

  // Distance-profile mismatch cost and its threshold indicators.
  Matrix profile(n, m);
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    const Empirical1D px = distance_profile(x, i);
    for (std::size_t j = 0; j < m; ++j) {
      const Empirical1D py = distance_profile(y, j);
      double w1 = 0.0;
      std::vector<double> grid;
      for (const Atom& a : px.atoms()) grid.push_back(a.value);
      for (const Atom& a : py.atoms()) grid.push_back(a.value);
      std::sort(grid.begin(), grid.end());
      for (std::size_t k = 0; k + 1 < grid.size(); ++k)
        w1 += std::abs(px.mass_below(grid[k + 1]) - py.mass_below(grid[k + 1])) *
              (grid[k + 1] - grid[k]);
      profile(i, j) = w1;
      values.push_back(w1);
    }
  }
  candidates.push_back(transport_lp(profile, mu, nu).coupling);
  const std::vector<double> thresholds = distinct_positive(values);
  const std::size_t stride = std::max<std::size_t>(1, thresholds.size() / 16);
  for (std::size_t k = 0; k < thresholds.size(); k += stride) {
    Matrix cost(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) cost(i, j) = profile(i, j) >= thresholds[k] ? 1.0 : 0.0;
    candidates.push_back(transport_lp(cost, mu, nu).coupling);
  }
  // Minimiser of the truncated quadratic objective.
  const Matrix trunc = g.truncated();
  candidates.push_back(frank_wolfe(trunc, mu, nu, candidates[1], opts.fw_iterations,
                                   StepRule::kLineSearch).coupling);

  EurandomCore best{std::numeric_limits<double>::infinity(), candidates.front(), false};
  for (Coupling& c : candidates) {
    const double v = ky_fan_from_geometry(g, c);
    if (v < best.value) best = {v, std::move(c), false};
  }
  // Conditional-gradient refinement on the bad-pair mass of the levels that
  // could still beat the incumbent.
  std::vector<std::size_t> useful;
  for (std::size_t k = 0; k < g.levels.size(); ++k)
    if (k == 0 || g.levels[k - 1] < best.value) useful.push_back(k);
  if (useful.size() > 8) useful.erase(useful.begin(), useful.end() - 8);
  for (std::size_t k : useful) {
    const Matrix q = g.indicator_at_least(g.levels[k]);
    QuadraticResult r = frank_wolfe(q, mu, nu, best.coupling, opts.fw_iterations,
                                    StepRule::kLineSearch);
    const double v = ky_fan_from_geometry(g, r.coupling);
    if (v < best.value) best = {v, std::move(r.coupling), false};
  }
  return best;
}

MetricResult eurandom_oriented(const FiniteMMSpace& x, const FiniteMMSpace& y,
                               const MetricOptions& opts) {
  if (x == y) return zero_result(x, true);
  const PairGeometry g(x, y);
  MetricResult out;
  if (g.cells <= opts.exact_cells) {
    EurandomCore e = eurandom_exact(g, x, y, opts.exact_cells);
    if (e.exact) {
      out.interval = {e.value, e.value, {Witness::Kind::kExact, "face enumeration of the coupling polytope"},
                      {Witness::Kind::kExact, "face enumeration of the coupling polytope"}};
      out.objective = ky_fan_from_geometry(g, e.coupling);
      out.coupling = std::move(e.coupling);
      return out;
    }
  }
  EurandomCore e = eurandom_upper(g, x, y, opts);
  const double lower = std::min(distance_distribution_prohorov(x, y), e.value);
  out.interval = {lower, e.value,
                  {Witness::Kind::kInequality,
                   "Prohorov distance of the distance distributions (marginalisation)"},
                  {Witness::Kind::kCoupling, "best candidate coupling"}};
  out.objective = e.value;
  out.coupling = std::move(e.coupling);
  return out;
}

MetricResult mod_eurandom_oriented(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                   const MetricOptions& opts) {
  if (x == y) return zero_result(x, true);
  const PairGeometry g(x, y);
  const Matrix q = g.truncated();
  const auto mu = x.weights(), nu = y.weights();
  MetricResult out;
  if (auto r = minimize_quadratic_exact(q, mu, nu, opts.exact_cells)) {
    out.interval = {r->value, r->value, {Witness::Kind::kExact, "face enumeration of the coupling polytope"},
                    {Witness::Kind::kExact, "face enumeration of the coupling polytope"}};
    out.objective = r->value;
    out.coupling = std::move(r->coupling);
    return out;
  }
  Rng rng(opts.seed);
  std::optional<QuadraticResult> best;
  for (std::size_t s = 0; s < opts.fw_restarts; ++s) {
    const Coupling start = s == 0 ? Coupling::product(mu, nu) : random_vertex(mu, nu, rng);
    QuadraticResult r = frank_wolfe(q, mu, nu, start, opts.fw_iterations, StepRule::kOpenLoop);
    if (!best || r.value < best->value) best = std::move(r);
  }
  const MetricResult eur = eurandom_oriented(x, y, opts);
  const double lower = std::min(eur.interval.lower * eur.interval.lower, best->value);
  out.interval = {lower, best->value,
                  {Witness::Kind::kInequality, "square of the Eurandom lower bound"},
                  {Witness::Kind::kCoupling, "Frank-Wolfe"}};
  out.objective = best->value;
  out.coupling = std::move(best->coupling);
  return out;
}

MetricResult relation_metric(const FiniteMMSpace& x, const FiniteMMSpace& y,
                             const MetricOptions& opts, bool wasserstein) {
  if (x == y) return zero_result(x, false);
  const RelationObjective objective = [&](const Relation&, const GluedSpace& g) {
    return wasserstein ? wasserstein_objective(x, y, g) : prohorov_objective(x, y, g);
  };
  FamilyResult fam = minimize_relation_family(x, y, objective, opts);
  MetricResult out;
  out.objective = fam.value;
  if (fam.exhaustive) {
    out.interval = {fam.value, fam.value, {Witness::Kind::kExact, "relation enumeration"},
                    {Witness::Kind::kExact, "relation enumeration"}};
  } else {
    const MetricResult eur = eurandom_oriented(x, y, opts);
    const double gpr_lower = 0.5 * eur.interval.lower;
    double lower = wasserstein ? gpr_lower * gpr_lower : gpr_lower;
    lower = std::min(lower, fam.value);
    out.interval = {lower, fam.value,
                    {Witness::Kind::kInequality,
                     wasserstein ? "square of half the Eurandom lower bound"
                                 : "half the Eurandom lower bound"},
                    {Witness::Kind::kRelation, "best relation of the heuristic family"}};
  }
  out.relation = std::move(fam.relation);
  return out;
}

}  // namespace

MetricResult gromov_hausdorff(const FiniteMMSpace& x, const FiniteMMSpace& y,
                              const MetricOptions& opts) {
  return symmetrized(x, y, [&](const FiniteMMSpace& a, const FiniteMMSpace& b) {
    return gh_oriented(a, b, opts);
  });
}

MetricResult gromov_prohorov(const FiniteMMSpace& x, const FiniteMMSpace& y,
                             const MetricOptions& opts) {
  return symmetrized(x, y, [&](const FiniteMMSpace& a, const FiniteMMSpace& b) {
    return relation_metric(a, b, opts, false);
  });
}

MetricResult gromov_wasserstein(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                const MetricOptions& opts) {
  return symmetrized(x, y, [&](const FiniteMMSpace& a, const FiniteMMSpace& b) {
    return relation_metric(a, b, opts, true);
  });
}

MetricResult eurandom(const FiniteMMSpace& x, const FiniteMMSpace& y,
                      const MetricOptions& opts) {
  return symmetrized(x, y, [&](const FiniteMMSpace& a, const FiniteMMSpace& b) {
    return eurandom_oriented(a, b, opts);
  });
}

MetricResult mod_eurandom(const FiniteMMSpace& x, const FiniteMMSpace& y,
                          const MetricOptions& opts) {
  return symmetrized(x, y, [&](const FiniteMMSpace& a, const FiniteMMSpace& b) {
    return mod_eurandom_oriented(a, b, opts);
  });
}

double eurandom_random_search(const FiniteMMSpace& x, const FiniteMMSpace& y,
                              std::size_t restarts, Rng& rng) {
  const PairGeometry g(x, y);
  const auto mu = x.weights(), nu = y.weights();
  std::vector<std::pair<double, Coupling>> top;
  const std::size_t keep = 8;
  for (std::size_t s = 0; s < restarts; ++s) {
    // Random point of the polytope: mixture of up to three random vertices.
    const std::size_t parts = 1 + rng.below(3);
    Matrix pi(x.size(), y.size());
    std::vector<double> w(parts);
    double total = 0.0;
    for (double& v : w) total += (v = rng.exponential(1.0));
    for (std::size_t p = 0; p < parts; ++p) {
      const Coupling v = random_vertex(mu, nu, rng);
      for (std::size_t c = 0; c < pi.data().size(); ++c) pi.data()[c] += w[p] / total * v.pi.data()[c];
    }
    Coupling c{std::move(pi)};
    const double f = ky_fan_from_geometry(g, c);
    if (top.size() < keep || f < top.back().first) {
      top.emplace_back(f, std::move(c));
      std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (top.size() > keep) top.pop_back();
    }
  }
  double best = top.front().first;
  for (const auto& [f, c] : top) {
    for (std::size_t k = 0; k < g.levels.size(); ++k) {
      if (k > 0 && g.levels[k - 1] >= best) break;
      const QuadraticResult r = frank_wolfe(g.indicator_at_least(g.levels[k]), mu, nu, c, 300,
                                            StepRule::kLineSearch);
      best = std::min(best, ky_fan_from_geometry(g, r.coupling));
    }
  }
  return best;
}

}  // namespace mmspace
