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
#include <string>
#include <vector>

#include "mmspace/random.hpp"
#include "mmspace/space.hpp"

namespace mmspace {

struct BetaComponent {
  double a;
  double b;
  double mass;  // total mass of the component (the density is normalised)
};

struct InteriorAtom {
  double x;  // location in (0, 1)
  double mass;
};

/// Finite measure on [0, 1]: atoms at 0 and 1, interior atoms and
/// Beta-density components.
struct LambdaMeasure {
  double atom0 = 0.0;
  double atom1 = 0.0;
  std::vector<BetaComponent> betas;
  std::vector<InteriorAtom> atoms;

  double total_mass() const;

  static LambdaMeasure kingman();
  static LambdaMeasure bolthausen_sznitman();
  static LambdaMeasure beta(double a, double b, double mass = 1.0);

  /// Parses "kingman", "bolthausen-sznitman", "beta:a,b[,mass]" and
  /// "atom:x,mass" terms joined by '+'. atom:0,m and atom:1,m land in the
  /// boundary atoms. Throws ErrorKind::kParse.
  static LambdaMeasure parse(const std::string& source);

  /// Throws ErrorKind::kDegenerateLambda unless all masses are
  /// nonnegative, the parameters are admissible and the total is positive.
  void validate() const;
};

/// lambda_{b,k} = integral of x^(k-2) (1-x)^(b-k) Lambda(dx), 2 <= k <= b.
double lambda_rate(const LambdaMeasure& lambda, std::size_t b, std::size_t k);

/// Sum over k of C(b,k) lambda_{b,k}.
double total_merge_rate(const LambdaMeasure& lambda, std::size_t b);

/// Partition of {0, ..., n-1}; blocks sorted, ordered by least element.
struct PartitionState {
  std::vector<std::vector<std::size_t>> blocks;

  static PartitionState singletons(std::size_t n);
  /// Merges the blocks with the given indices and restores canonical order.
  void merge(const std::vector<std::size_t>& indices);
  std::size_t block_of(std::size_t individual) const;
};

struct MergeEvent {
  double time;
  std::vector<std::size_t> blocks;  // indices into the state before the event
};

struct CoalescentRun {
  std::size_t n = 0;
  std::vector<MergeEvent> events;
  PartitionState final_state;

  bool fully_coalesced() const { return final_state.blocks.size() == 1; }
  /// Partition at time t (events at times <= t applied).
  PartitionState state_at(double t) const;
};

/// Cached merger-size laws for one Lambda measure, reused across runs.
class MergerTable {
 public:
  explicit MergerTable(LambdaMeasure lambda);

  const LambdaMeasure& lambda() const noexcept { return lambda_; }
  /// Total merge rate with b blocks.
  double total_rate(std::size_t b);
  /// Draws the number of merging blocks k given b blocks.
  std::size_t sample_k(std::size_t b, Rng& rng);

 private:
  void ensure(std::size_t b);

  LambdaMeasure lambda_;
  std::vector<std::vector<double>> cumulative_;  // indexed by b, then k-2
};

/// Gillespie simulation of the n-coalescent started from singletons. Stops
/// at one block or, if given, at time t_max. Throws kDegenerateLambda.
CoalescentRun simulate(const LambdaMeasure& lambda, std::size_t n, Rng& rng,
                       std::optional<double> t_max = std::nullopt);
CoalescentRun simulate(MergerTable& table, std::size_t n, Rng& rng,
                       std::optional<double> t_max = std::nullopt);

/// Pairwise coalescence times with uniform weights. Throws
/// kNotFullyCoalesced for runs stopped early.
FiniteMMSpace coalescent_to_mmspace(const CoalescentRun& run);

enum class DustClass { kDustFree, kDust };
const char* to_string(DustClass c);

/// Analytic rule for divergence of the integral of x^-1 Lambda(dx).
DustClass dust_classifier(const LambdaMeasure& lambda);

struct QuadratureProbe {
  DustClass verdict;
  /// Integral over [2^-(k+1), 2^-k] for k = 0, 1, ...
  std::vector<double> shells;
  /// Ratio of the last two shells (inf for an atom at 0).
  double tail_ratio;
};

/// Numerical cross-check of dust_classifier: integrates x^-1 Lambda(dx) on
/// dyadic shells towards 0 and declares divergence when the shell
/// integrals stop decaying.
QuadratureProbe dust_quadrature_probe(const LambdaMeasure& lambda,
                                      std::size_t shells = 60);

/// Size of the block containing i at time t, divided by n.
double singleton_frequency(const CoalescentRun& run, double t, std::size_t i);

struct BallMassCurve {
  std::vector<double> delta;
  std::vector<double> estimate;
  std::vector<double> std_error;
};

/// Monte Carlo estimate of mu_n{x : mu_n(B_t(x)) <= delta} for each delta
/// in the grid. Run r uses rng.split(r).
BallMassCurve empirical_ball_mass_curve(const LambdaMeasure& lambda,
                                        std::size_t n, double t,
                                        const std::vector<double>& delta_grid,
                                        std::size_t runs, const Rng& rng);

}  // namespace mmspace
