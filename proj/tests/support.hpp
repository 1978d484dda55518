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

#include <algorithm>
#include <cstddef>
#include <vector>

#include "mmspace/random.hpp"
#include "mmspace/space.hpp"

namespace mmspace::testing {

/// Random shortest-path metric on n points with integer edge lengths in
/// [1, max_edge] and integer weights in [1, 5] normalised by their sum.
/// Integer data keeps every breakpoint exact.
inline FiniteMMSpace random_space(Rng& rng, std::size_t n, int max_edge = 3) {
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double e = 1.0 + static_cast<double>(rng.below(static_cast<std::size_t>(max_edge)));
      d(i, j) = d(j, i) = e;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = 1.0 + static_cast<double>(rng.below(5)));
  for (double& x : w) x /= total;
  // Push the rounding residue into the largest weight.
  double sum = 0.0;
  for (double x : w) sum += x;
  *std::max_element(w.begin(), w.end()) += 1.0 - sum;
  return FiniteMMSpace::unlabelled(std::move(d), std::move(w));
}

/// Random size in [1, max_n].
inline std::size_t random_size(Rng& rng, std::size_t max_n) { return 1 + rng.below(max_n); }

}  // namespace mmspace::testing
