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
#include <optional>
#include <span>

#include "mmspace/matrix.hpp"
#include "mmspace/transport.hpp"

namespace mmspace {

// Quadratic objectives over the coupling polytope of (mu, nu). A coupling
// pi (n x m) is flattened to cells c = i * m + j and the objective is
// pi^T Q pi with Q a symmetric (nm) x (nm) matrix.

struct QuadraticResult {
  Coupling coupling;
  double value;
};

double quadratic_value(const Matrix& q, const Coupling& pi);

/// Global minimum of pi^T Q pi over all couplings of strictly positive
/// marginals mu, nu, by enumerating every face (support pattern) of the
/// polytope and solving for the stationary point of the restriction.
/// Returns nullopt when n*m exceeds max_cells.
std::optional<QuadraticResult> minimize_quadratic_exact(
    const Matrix& q, std::span<const double> mu, std::span<const double> nu,
    std::size_t max_cells);

enum class StepRule { kOpenLoop, kLineSearch };

/// Conditional gradient (Frank-Wolfe) from `start`; each linearised step is
/// solved exactly by transport_lp. kOpenLoop uses the step 2/(t+2). Returns
/// the best iterate seen.
QuadraticResult frank_wolfe(const Matrix& q, std::span<const double> mu,
                            std::span<const double> nu, const Coupling& start,
                            std::size_t iterations,
                            StepRule rule = StepRule::kOpenLoop);

}  // namespace mmspace
