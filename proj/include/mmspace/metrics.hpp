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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmspace/matrix.hpp"
#include "mmspace/random.hpp"
#include "mmspace/space.hpp"
#include "mmspace/transport.hpp"

namespace mmspace {

/// Boolean n x m matrix: a subset of X x Y.
class Relation {
 public:
  Relation(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  static Relation full(std::size_t rows, std::size_t cols);
  static Relation identity(std::size_t n);
  /// Support {(i,j) : pi(i,j) > threshold}.
  static Relation support_of(const Coupling& pi, double threshold = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool operator()(std::size_t i, std::size_t j) const {
    return bits_[i * cols_ + j] != 0;
  }
  void set(std::size_t i, std::size_t j, bool v) { bits_[i * cols_ + j] = v; }
  void flip(std::size_t i, std::size_t j) { bits_[i * cols_ + j] ^= 1; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  /// Every row and every column contains a related pair.
  bool is_correspondence() const;
  Relation transposed() const;

  bool operator==(const Relation&) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<unsigned char> bits_;
};

/// X disjoint-union Y with the metric extension induced by a relation.
/// Points 0..n-1 are X, n..n+m-1 are Y.
struct GluedSpace {
  std::size_t n = 0;
  std::size_t m = 0;
  Matrix dist;
  Relation relation{0, 0};

  /// Distance between x in X and y in Y.
  double cross(std::size_t x, std::size_t y) const { return dist(x, n + y); }
};

/// How an endpoint of a CertifiedInterval was obtained.
struct Witness {
  enum class Kind { kExact, kCoupling, kRelation, kInequality };
  Kind kind;
  std::string detail;
};

std::string to_string(const Witness& w);

struct CertifiedInterval {
  double lower = 0.0;
  double upper = 0.0;
  Witness lower_witness{Witness::Kind::kInequality, ""};
  Witness upper_witness{Witness::Kind::kExact, ""};

  bool exact() const {
    return lower == upper && lower_witness.kind == Witness::Kind::kExact;
  }
};

/// Result of a metric computation: the interval plus the object attaining
/// the upper bound.
struct MetricResult {
  CertifiedInterval interval;
  std::optional<Coupling> coupling;
  std::optional<Relation> relation;
  double objective = 0.0;  // witness objective; equals interval.upper
};

struct MetricOptions {
  /// Eurandom and modified Eurandom are solved exactly up to this many
  /// coupling cells (n*m).
  std::size_t exact_cells = 9;
  /// Maximal cliques visited before relation enumeration is abandoned in
  /// favour of the heuristic family.
  std::size_t relation_budget = 200'000;
  /// Gromov-Hausdorff enumerates correspondences up to this many cells.
  std::size_t gh_exact_cells = 20;
  std::size_t fw_iterations = 200;
  std::size_t fw_restarts = 8;
  std::uint64_t seed = 0x6d6d7370ULL;
};

struct ProhorovResult {
  double value;
  Coupling coupling;
};

/// Prohorov distance between mu and nu on a common finite metric space,
/// via the coupling characterisation with a threshold scan.
double prohorov(const Matrix& dist, std::span<const double> mu,
                std::span<const double> nu);

/// Prohorov distance between mu on rows and nu on columns when only the
/// cross distances matter (the two supports live in a common space).
ProhorovResult prohorov_bipartite(const Matrix& cross,
                                  std::span<const double> mu,
                                  std::span<const double> nu);

/// Wasserstein distance with cost min(r, 1) from cross distances.
TransportResult truncated_wasserstein_bipartite(const Matrix& cross,
                                                std::span<const double> mu,
                                                std::span<const double> nu);

double distortion(const Relation& r, const FiniteMMSpace& x,
                  const FiniteMMSpace& y);

GluedSpace glue(const FiniteMMSpace& x, const FiniteMMSpace& y,
                const Relation& r);

/// Prohorov distance of the two measures inside glue(x, y, r).
double prohorov_glued(const FiniteMMSpace& x, const FiniteMMSpace& y,
                      const Relation& r);

/// Ky Fan level of a fixed coupling:
/// inf{eps > 0 : pi^{x2}{|r_X - r_Y| >= eps} < eps}.
double ky_fan_level(const FiniteMMSpace& x, const FiniteMMSpace& y,
                    const Coupling& pi);

/// Integral of |r_X - r_Y| ^ 1 under pi x pi.
double mod_eurandom_objective(const FiniteMMSpace& x, const FiniteMMSpace& y,
                              const Coupling& pi);

MetricResult gromov_hausdorff(const FiniteMMSpace& x, const FiniteMMSpace& y,
                              const MetricOptions& opts = {});
MetricResult gromov_prohorov(const FiniteMMSpace& x, const FiniteMMSpace& y,
                             const MetricOptions& opts = {});
MetricResult eurandom(const FiniteMMSpace& x, const FiniteMMSpace& y,
                      const MetricOptions& opts = {});
MetricResult gromov_wasserstein(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                const MetricOptions& opts = {});
MetricResult mod_eurandom(const FiniteMMSpace& x, const FiniteMMSpace& y,
                          const MetricOptions& opts = {});

/// Best Ky Fan level found by random couplings (random vertex mixtures)
/// followed by Frank-Wolfe line-search polishing. Upper bound only; used to
/// calibrate the exact Eurandom solver.
double eurandom_random_search(const FiniteMMSpace& x, const FiniteMMSpace& y,
                              std::size_t restarts, Rng& rng);

/// Minimum of objective(R, glue(x, y, R)) over every nonempty relation, by
/// visiting maximal cliques of the pair-compatibility graph at each
/// distortion level (objectives must be monotone in the cross distances).
/// Returns nullopt when more than `budget` cliques would be visited.
struct RelationMinimum {
  Relation relation;
  double value;
};
using RelationObjective =
    std::function<double(const Relation&, const GluedSpace&)>;
std::optional<RelationMinimum> minimize_over_relations(
    const FiniteMMSpace& x, const FiniteMMSpace& y,
    const RelationObjective& objective, std::size_t budget);

}  // namespace mmspace
