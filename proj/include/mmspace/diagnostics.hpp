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
#include <string>
#include <vector>

#include "mmspace/functionals.hpp"
#include "mmspace/metrics.hpp"
#include "mmspace/random.hpp"
#include "mmspace/space.hpp"

namespace mmspace {

// All verdicts below are relative to the probed grids: a finite report can
// refute a condition or support it on the grid, never decide it for an
// infinite family.

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct ConditionVerdict {
  bool passed = false;
  double statistic = 0.0;  // value compared against the threshold
  double threshold = 0.0;
  std::string detail;
};

struct ReportThresholds {
  /// Condition (i) passes when the tail mass at the largest C is below this.
  double tail = 0.1;
  /// Condition (ii) passes when v_delta at the smallest delta is below this.
  double modulus = 0.1;
};

/// Grid summary of a family. For precompactness_report the statistics are
/// suprema over the family (standard errors 0); for tightness_report they
/// are Monte Carlo means over sampled spaces.
struct FamilyReport {
  std::string statistic;  // "sup" or "mean"
  std::vector<double> delta_grid;
  std::vector<Estimate> v;  // per delta
  std::vector<double> c_grid;
  std::vector<Estimate> tail;  // per C: w_X([C, inf))
  ConditionVerdict condition_i;
  ConditionVerdict condition_ii;
};

FamilyReport precompactness_report(const std::vector<FiniteMMSpace>& family,
                                   const std::vector<double>& delta_grid,
                                   const std::vector<double>& c_grid,
                                   const ReportThresholds& thresholds = {});

using SpaceSampler = std::function<FiniteMMSpace(Rng&)>;

/// Monte Carlo forms of the tightness condition for a random space.
struct TightnessReport {
  FamilyReport family;  // E[v_delta] and E[w_X([C, inf))]
  std::vector<double> eps_grid;
  std::vector<std::vector<Estimate>> prob_v_at_least;  // [delta][eps]
  std::vector<std::vector<Estimate>> thin_mass;        // [delta][eps]
  std::size_t runs = 0;
};

/// Run r draws its space with rng.split(r).
TightnessReport tightness_report(const SpaceSampler& sampler, std::size_t runs,
                                 const std::vector<double>& delta_grid,
                                 const std::vector<double>& eps_grid,
                                 const std::vector<double>& c_grid,
                                 const Rng& rng,
                                 const ReportThresholds& thresholds = {});

struct CrosscheckRow {
  std::size_t index;  // pair (index, index + 1)
  CertifiedInterval gpr;
  CertifiedInterval eurandom;
  std::vector<double> poly_gaps;  // |Phi(X_{i+1}) - Phi(X_i)|
};

struct CrosscheckTable {
  std::vector<CrosscheckRow> rows;
  double tolerance = 0.0;
  /// Largest polynomial gap over the second half of the rows.
  double max_late_gap = 0.0;
  bool gpr_vanishing = false;    // last GPr upper bound <= tolerance
  bool polys_cauchy = false;     // max_late_gap <= tolerance
  bool implication_holds = false;  // gpr_vanishing implies polys_cauchy
};

/// Tabulates consecutive Gromov-Prohorov and Eurandom intervals and exact
/// polynomial gaps along a sequence of spaces.
CrosscheckTable convergence_crosscheck(const std::vector<FiniteMMSpace>& sequence,
                                       const std::vector<Polynomial>& polys,
                                       double tolerance,
                                       const MetricOptions& opts = {});

}  // namespace mmspace
