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

#include "mmspace/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mmspace/error.hpp"

namespace mmspace {

namespace {

// Slack for "mass <= delta" style comparisons on sums of weights.
constexpr double kMassSlack = 1e-12;

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t result = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && result > kEnumerationLimit / base) {
      return kEnumerationLimit + 1;
    }
    result *= base;
  }
  return result;
}

void require_enumerable(std::size_t n, std::size_t exp, const char* what) {
  if (checked_power(n, exp) > kEnumerationLimit) {
    std::ostringstream os;
    os << "TooLarge: " << what << " needs " << n << "^" << exp
       << " tuples, limit " << kEnumerationLimit;
    throw Error(ErrorKind::kTooLarge, os.str());
  }
}

}  // namespace

Empirical1D::Empirical1D(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  for (const Atom& a : atoms) {
    if (a.mass <= 0.0) continue;
    if (!atoms_.empty() && atoms_.back().value == a.value) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
}

double Empirical1D::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.mass;
  return s;
}

double Empirical1D::mass_below(double t) const {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.value >= t) break;
    s += a.mass;
  }
  return s;
}

double Empirical1D::mass_at_least(double t) const {
  double s = 0.0;
  for (const Atom& a : atoms_)
    if (a.value >= t) s += a.mass;
  return s;
}

double Empirical1D::mean() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.value * a.mass;
  return s;
}

double Empirical1D::expect(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += f(a.value) * a.mass;
  return s;
}

bool Empirical1D::approx_equal(const Empirical1D& other, double tol) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (std::abs(atoms_[i].value - other.atoms_[i].value) > tol ||
        std::abs(atoms_[i].mass - other.atoms_[i].mass) > tol) {
      return false;
    }
  }
  return true;
}

RandomDistanceDistribution::RandomDistanceDistribution(
    std::vector<LawAtom> atoms) {
  for (LawAtom& a : atoms) {
    auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const LawAtom& b) {
      return b.law.approx_equal(a.law, kLawTolerance);
    });
    if (it != atoms_.end()) {
      it->mass += a.mass;
    } else {
      atoms_.push_back(std::move(a));
    }
  }
}

bool RandomDistanceDistribution::approx_equal(
    const RandomDistanceDistribution& other, double tol) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  std::vector<bool> used(other.atoms_.size(), false);
  for (const LawAtom& a : atoms_) {
    bool matched = false;
    for (std::size_t j = 0; j < other.atoms_.size() && !matched; ++j) {
      if (used[j]) continue;
      const LawAtom& b = other.atoms_[j];
      if (std::abs(a.mass - b.mass) <= tol && a.law.approx_equal(b.law, tol)) {
        used[j] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

Empirical1D MomentMeasure::marginal(std::size_t coord) const {
  std::vector<Atom> atoms;
  atoms.reserve(this->atoms.size());
  for (const MomentAtom& a : this->atoms) atoms.push_back({a.point.at(coord), a.mass});
  return Empirical1D(std::move(atoms));
}

DistanceMatrixSample::DistanceMatrixSample(std::size_t m,
                                           std::vector<double> entries)
    : m_(m), entries_(std::move(entries)) {
  if (entries_.size() != m * (m - 1) / 2) {
    throw Error(ErrorKind::kDimensionMismatch,
                "DimensionMismatch: distance sample has wrong entry count");
  }
}

double DistanceMatrixSample::at(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  // Offset of row i in the packed strict upper triangle.
  const std::size_t offset = i * m_ - i * (i + 1) / 2;
  return entries_[offset + (j - i - 1)];
}

bool DistanceMatrixSample::satisfies_triangle(double tol) const {
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = i + 1; j < m_; ++j)
      for (std::size_t k = j + 1; k < m_; ++k) {
        const double a = at(i, j), b = at(j, k), c = at(i, k);
        if (a + b < c - tol || a + c < b - tol || b + c < a - tol) return false;
      }
  return true;
}

Empirical1D distance_distribution(const FiniteMMSpace& x) {
  std::map<double, double> acc;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      acc[x.distance(i, j)] += x.weight(i) * x.weight(j);
  std::vector<Atom> atoms;
  atoms.reserve(acc.size());
  for (const auto& [v, m] : acc) atoms.push_back({v, m});
  return Empirical1D(std::move(atoms));
}

Empirical1D distance_profile(const FiniteMMSpace& x, std::size_t i) {
  std::vector<Atom> atoms;
  atoms.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    atoms.push_back({x.distance(i, j), x.weight(j)});
  return Empirical1D(std::move(atoms));
}

double thin_mass(const FiniteMMSpace& x, double eps, double delta) {
  const std::size_t n = x.size();
  double thin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ball = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (x.distance(i, j) < eps) ball += x.weight(j);
    if (ball <= delta + kMassSlack) thin += x.weight(i);
  }
  return thin;
}

namespace {

// Infimum of {eps > 0 : f(eps) <= eps} for f(eps) = mass{x : escape_x >= eps},
// where escape_x is the radius beyond which the open ball around x carries
// mass > delta (infinity if never). f is constant on (e_{k-1}, e_k].
double infimum_from_escape_radii(std::vector<std::pair<double, double>> escape) {
  std::sort(escape.begin(), escape.end());
  std::vector<double> levels;
  for (const auto& [e, w] : escape)
    if (e > 0.0 && std::isfinite(e) &&
        (levels.empty() || levels.back() != e)) {
      levels.push_back(e);
    }
  auto mass_at_least = [&](double t) {
    double s = 0.0;
    for (const auto& [e, w] : escape)
      if (e >= t) s += w;
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  double lower = 0.0;
  for (double e : levels) {
    const double f = mass_at_least(e);
    if (f <= e + kMassSlack) best = std::min(best, std::max(lower, f));
    lower = e;
  }
  const double tail = mass_at_least(std::numeric_limits<double>::infinity());
  best = std::min(best, std::max(lower, tail));
  // eps = 1 always qualifies since no set carries more than the total mass;
  // the clamp only removes rounding excess of the summed weights.
  return std::min(best, 1.0);
}

}  // namespace

double modulus_of_mass_distribution(const FiniteMMSpace& x, double delta) {
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> escape;
  escape.reserve(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x.distance(i, a) < x.distance(i, b);
    });
    double cumulative = 0.0;
    double radius = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n;) {
      const double t = x.distance(i, order[p]);
      while (p < n && x.distance(i, order[p]) == t) cumulative += x.weight(order[p++]);
      if (cumulative > delta + kMassSlack) {
        radius = t;
        break;
      }
    }
    escape.emplace_back(radius, x.weight(i));
  }
  return infimum_from_escape_radii(std::move(escape));
}

RandomDistanceDistribution random_distance_distribution(const FiniteMMSpace& x) {
  std::vector<LawAtom> atoms;
  atoms.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    atoms.push_back({distance_profile(x, i), x.weight(i)});
  return RandomDistanceDistribution(std::move(atoms));
}

double modulus_from_random_distance_distribution(
    const RandomDistanceDistribution& hat_mu, double delta) {
  // f(eps) = hat_mu{nu : nu([0, eps)) <= delta}; right limit uses [0, eps].
  auto f = [&](double eps) {
    double s = 0.0;
    for (const LawAtom& a : hat_mu.atoms())
      if (a.law.mass_below(eps) <= delta + kMassSlack) s += a.mass;
    return s;
  };
  auto f_right = [&](double eps) {
    double s = 0.0;
    for (const LawAtom& a : hat_mu.atoms()) {
      double closed = 0.0;
      for (const Atom& at : a.law.atoms())
        if (at.value <= eps) closed += at.mass;
      if (closed <= delta + kMassSlack) s += a.mass;
    }
    return s;
  };
  std::vector<double> breakpoints{0.0};
  for (const LawAtom& a : hat_mu.atoms())
    for (const Atom& at : a.law.atoms())
      if (at.value > 0.0) breakpoints.push_back(at.value);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());

  double best = std::numeric_limits<double>::infinity();
  // Infimum approached from the right of a breakpoint.
  for (double d : breakpoints)
    if (f_right(d) <= d + kMassSlack) best = std::min(best, d);
  // Infimum attained where eps equals a value of f.
  std::vector<double> values;
  for (double d : breakpoints) values.push_back(f_right(d));
  for (double c : values)
    if (c > 0.0 && f(c) <= c + kMassSlack) best = std::min(best, c);
  return std::min(best, 1.0);
}

MomentMeasure moment_measure(const FiniteMMSpace& x, std::size_t k) {
  if (k == 0) {
    throw Error(ErrorKind::kPreconditionFailed,
                "PreconditionFailed: moment order must be positive");
  }
  const std::size_t n = x.size();
  require_enumerable(n, k + 1, "moment_measure");
  std::map<std::vector<double>, double> acc;
  std::vector<std::size_t> idx(k, 0);
  std::vector<double> point(k);
  for (std::size_t u0 = 0; u0 < n; ++u0) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double mass = x.weight(u0);
      for (std::size_t c = 0; c < k; ++c) {
        point[c] = x.distance(u0, idx[c]);
        mass *= x.weight(idx[c]);
      }
      acc[point] += mass;
      std::size_t c = 0;
      while (c < k && ++idx[c] == n) idx[c++] = 0;
      if (c == k) break;
    }
  }
  MomentMeasure out;
  out.k = k;
  out.atoms.reserve(acc.size());
  for (auto& [p, m] : acc) out.atoms.push_back({p, m});
  return out;
}

DistanceMatrixSample sample_distance_matrix(const FiniteMMSpace& x,
                                            std::size_t m, Rng& rng) {
  if (m < 2) {
    throw Error(ErrorKind::kPreconditionFailed,
                "PreconditionFailed: distance sample needs m >= 2");
  }
  DiscreteSampler sampler(x.weights());
  std::vector<std::size_t> u(m);
  for (auto& v : u) v = sampler(rng);
  std::vector<double> entries;
  entries.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) entries.push_back(x.distance(u[i], u[j]));
  return DistanceMatrixSample(m, std::move(entries));
}

namespace {

void pairwise(const FiniteMMSpace& x, std::span<const std::size_t> pts,
              std::vector<double>& out) {
  out.clear();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      out.push_back(x.distance(pts[i], pts[j]));
}

}  // namespace

double evaluate_polynomial_exact(const FiniteMMSpace& x, const Polynomial& p) {
  const std::size_t n = x.size();
  require_enumerable(n, p.degree, "evaluate_polynomial_exact");
  std::vector<std::size_t> idx(p.degree, 0);
  std::vector<double> dists;
  double total = 0.0;
  while (true) {
    double mass = 1.0;
    for (std::size_t i : idx) mass *= x.weight(i);
    pairwise(x, idx, dists);
    total += mass * p.phi(dists);
    std::size_t c = 0;
    while (c < p.degree && ++idx[c] == n) idx[c++] = 0;
    if (c == p.degree) break;
  }
  return total;
}

McEstimate evaluate_polynomial_mc(const FiniteMMSpace& x, const Polynomial& p,
                                  std::size_t samples, Rng& rng) {
  if (samples == 0) {
    throw Error(ErrorKind::kPreconditionFailed,
                "PreconditionFailed: need at least one sample");
  }
  DiscreteSampler sampler(x.weights());
  std::vector<std::size_t> idx(p.degree);
  std::vector<double> dists;
  // Welford's running mean and variance.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    for (auto& i : idx) i = sampler(rng);
    pairwise(x, idx, dists);
    const double v = p.phi(dists);
    const double d = v - mean;
    mean += d / static_cast<double>(s);
    m2 += d * (v - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

std::vector<std::size_t> epsilon_net(const FiniteMMSpace& x, double delta,
                                     double eps) {
  const double v = modulus_of_mass_distribution(x, delta);
  if (!(v < eps)) {
    std::ostringstream os;
    os << "PreconditionFailed: v_delta = " << v << " is not below eps = " << eps;
    throw Error(ErrorKind::kPreconditionFailed, os.str());
  }
  const std::size_t n = x.size();
  std::vector<double> ball(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (x.distance(i, j) < eps) ball[i] += x.weight(j);
  std::vector<std::size_t> heavy;
  for (std::size_t i = 0; i < n; ++i)
    if (ball[i] > delta + kMassSlack) heavy.push_back(i);
  std::stable_sort(heavy.begin(), heavy.end(),
                   [&](std::size_t a, std::size_t b) { return ball[a] > ball[b]; });
  // Separation >= 2 eps keeps the open eps-balls disjoint and, by
  // maximality, puts every heavy point inside an open 2 eps-ball of the net.
  std::vector<std::size_t> net;
  for (std::size_t i : heavy) {
    bool separated = true;
    for (std::size_t c : net) separated = separated && x.distance(i, c) >= 2.0 * eps;
    if (separated) net.push_back(i);
  }
  std::sort(net.begin(), net.end());
  return net;
}

}  // namespace mmspace
