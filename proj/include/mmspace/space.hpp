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
#include <span>
#include <string>
#include <vector>

#include "mmspace/matrix.hpp"

namespace mmspace {

inline constexpr double kTriangleTolerance = 1e-12;
inline constexpr double kWeightSumTolerance = 1e-12;

/// A finite metric measure space: n labelled points, a metric given as a
/// symmetric matrix with zero diagonal, and strictly positive probability
/// weights. Instances are immutable once constructed and always valid.
class FiniteMMSpace {
 public:
  /// Validates and builds a space. Throws mmspace::Error naming the first
  /// violated invariant (and its indices, for triangle violations).
  FiniteMMSpace(std::vector<std::string> labels, Matrix dist,
                std::vector<double> weights);

  /// Same as the constructor with labels "0", "1", ...
  static FiniteMMSpace unlabelled(Matrix dist, std::vector<double> weights);

  /// Uniform weights 1/n.
  static FiniteMMSpace uniform(Matrix dist);

  std::size_t size() const noexcept { return weights_.size(); }
  double distance(std::size_t i, std::size_t j) const { return dist_(i, j); }
  double weight(std::size_t i) const { return weights_[i]; }

  const Matrix& dist() const noexcept { return dist_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Largest pairwise distance (0 for a single point).
  double diameter() const;

  bool operator==(const FiniteMMSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  Matrix dist_;
  std::vector<double> weights_;
};

/// Throws if (dist, weights) violates a space invariant. Exposed so callers
/// can check raw data without building a space.
void validate_space(const Matrix& dist, std::span<const double> weights,
                    std::size_t label_count);

/// True when r(i,j) <= max(r(i,k), r(k,j)) + tol for every triple. Runs in
/// O(n^2) by comparing the matrix with the minimax path distances of its
/// minimum spanning tree.
bool is_ultrametric(const Matrix& dist, double tol = kTriangleTolerance);

/// Direct O(n^3) triple loop, kept for cross-checking is_ultrametric.
bool is_ultrametric_bruteforce(const Matrix& dist,
                               double tol = kTriangleTolerance);

/// Merges points at mutual distance 0 by summing their weights. The first
/// point of each group keeps its label.
FiniteMMSpace canonicalize(const FiniteMMSpace& space);

/// True if some permutation p maps X onto Y with equal weights and
/// distances (within tol). Exhaustive search with pruning; intended for
/// small spaces.
bool are_isomorphic(const FiniteMMSpace& x, const FiniteMMSpace& y,
                    double tol = 1e-12);

}  // namespace mmspace
