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

#include <span>
#include <vector>

#include "mmspace/matrix.hpp"

namespace mmspace {

inline constexpr double kMarginalTolerance = 1e-10;

/// Nonnegative n x m matrix whose row sums are mu and column sums are nu.
struct Coupling {
  Matrix pi;

  std::size_t rows() const noexcept { return pi.rows(); }
  std::size_t cols() const noexcept { return pi.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return pi(i, j); }

  /// True when marginals match mu and nu within tol and entries are >= -tol.
  bool is_coupling_of(std::span<const double> mu, std::span<const double> nu,
                      double tol = kMarginalTolerance) const;

  static Coupling product(std::span<const double> mu, std::span<const double> nu);
  static Coupling identity(std::span<const double> mu);
};

struct TransportResult {
  Coupling coupling;
  double value;
};

/// Exact minimum-cost transport between mu and nu (transportation simplex
/// on the spanning-tree basis). Zero-mass rows and columns are allowed; nu
/// is rescaled to the total mass of mu.
TransportResult transport_lp(const Matrix& cost, std::span<const double> mu,
                             std::span<const double> nu);

/// Composition through the middle marginal:
/// pi13[i,k] = sum_j pi12[i,j] pi23[j,k] / mu2[j]. Throws kMarginalMismatch
/// when the column sums of pi12 and the row sums of pi23 differ.
Coupling compose_couplings(const Coupling& pi12, const Coupling& pi23);

}  // namespace mmspace
