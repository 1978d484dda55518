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

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mmspace/random.hpp"
#include "mmspace/space.hpp"

namespace mmspace {

/// Largest number of point tuples enumerated by the exact functionals.
inline constexpr std::size_t kEnumerationLimit = 10'000'000;

/// Atom merging tolerance for laws in the random distance distribution.
inline constexpr double kLawTolerance = 1e-12;

struct Atom {
  double value;
  double mass;
  bool operator==(const Atom&) const = default;
};

/// Finitely supported probability law on [0, inf): atoms sorted by value,
/// no duplicate values.
class Empirical1D {
 public:
  Empirical1D() = default;
  /// Sorts, merges equal values and drops zero masses.
  explicit Empirical1D(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double total_mass() const;
  /// Mass of [0, t).
  double mass_below(double t) const;
  /// Mass of [t, inf).
  double mass_at_least(double t) const;
  double mean() const;
  /// Integral of f against the law.
  double expect(const std::function<double(double)>& f) const;

  /// Same atoms (values and masses) within tol.
  bool approx_equal(const Empirical1D& other, double tol) const;

  bool operator==(const Empirical1D&) const = default;

 private:
  std::vector<Atom> atoms_;
};

struct LawAtom {
  Empirical1D law;
  double mass;
};

/// Law of the distance profile of a sampled base point: a finite mixture of
/// Empirical1D laws. Atoms with laws equal within kLawTolerance are merged.
class RandomDistanceDistribution {
 public:
  explicit RandomDistanceDistribution(std::vector<LawAtom> atoms);

  const std::vector<LawAtom>& atoms() const noexcept { return atoms_; }

  /// Same set of (law, mass) atoms within tol, irrespective of order.
  bool approx_equal(const RandomDistanceDistribution& other, double tol) const;

 private:
  std::vector<LawAtom> atoms_;
};

struct MomentAtom {
  std::vector<double> point;
  double mass;
};

/// k-th moment measure: law of (r(u0,u1), ..., r(u0,uk)) for i.i.d. u's.
struct MomentMeasure {
  std::size_t k = 0;
  std::vector<MomentAtom> atoms;  // sorted lexicographically by point

  /// Pushforward under the projection onto coordinate `coord`.
  Empirical1D marginal(std::size_t coord) const;
};

/// Strict upper triangle of an m x m matrix of sampled distances, stored
/// row-major: (0,1), (0,2), ..., (0,m-1), (1,2), ...
class DistanceMatrixSample {
 public:
  DistanceMatrixSample(std::size_t m, std::vector<double> entries);

  std::size_t m() const noexcept { return m_; }
  const std::vector<double>& entries() const noexcept { return entries_; }
  double at(std::size_t i, std::size_t j) const;

  /// r_ij + r_jk >= r_ik for every i < j < k (within tol), i.e. membership
  /// in the space of finite pseudo-distance matrices.
  bool satisfies_triangle(double tol = kTriangleTolerance) const;

 private:
  std::size_t m_;
  std::vector<double> entries_;
};

/// Test function of the pairwise distances of `degree` sampled points, in
/// the same upper-triangular order as DistanceMatrixSample. The caller is
/// responsible for phi being bounded.
struct Polynomial {
  std::size_t degree;
  std::function<double(std::span<const double>)> phi;
};

struct McEstimate {
  double estimate;
  double std_error;
};

Empirical1D distance_distribution(const FiniteMMSpace& x);

/// Law mu^x of the distances from point i.
Empirical1D distance_profile(const FiniteMMSpace& x, std::size_t i);

/// Exact modulus of mass distribution with open balls. Returns a value in
/// [0, 1].
double modulus_of_mass_distribution(const FiniteMMSpace& x, double delta);

/// mu{x : mu(B_eps(x)) <= delta}, open balls.
double thin_mass(const FiniteMMSpace& x, double eps, double delta);

RandomDistanceDistribution random_distance_distribution(const FiniteMMSpace& x);

/// v_delta evaluated from the random distance distribution alone, by a
/// direct scan over candidate levels. Agrees with
/// modulus_of_mass_distribution exactly.
double modulus_from_random_distance_distribution(
    const RandomDistanceDistribution& hat_mu, double delta);

/// Throws ErrorKind::kTooLarge when n^(k+1) exceeds kEnumerationLimit.
MomentMeasure moment_measure(const FiniteMMSpace& x, std::size_t k);

DistanceMatrixSample sample_distance_matrix(const FiniteMMSpace& x,
                                            std::size_t m, Rng& rng);

/// Throws ErrorKind::kTooLarge when n^degree exceeds kEnumerationLimit.
double evaluate_polynomial_exact(const FiniteMMSpace& x, const Polynomial& p);

McEstimate evaluate_polynomial_mc(const FiniteMMSpace& x, const Polynomial& p,
                                  std::size_t samples, Rng& rng);

/// Maximal separated net of points whose eps-ball carries mass > delta.
/// Requires v_delta(X) < eps (throws kPreconditionFailed otherwise).
std::vector<std::size_t> epsilon_net(const FiniteMMSpace& x, double delta,
                                     double eps);

}  // namespace mmspace
