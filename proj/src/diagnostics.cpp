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

#include "mmspace/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmspace/error.hpp"

namespace mmspace {

namespace {

void require_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) {
    throw Error(ErrorKind::kPreconditionFailed,
                std::string("PreconditionFailed: empty ") + name);
  }
}

std::string describe(const char* what, double at, double value, double threshold) {
  std::ostringstream os;
  os << what << " at " << at << " is " << value << " (threshold " << threshold
     << ", on probed grid)";
  return os.str();
}

void set_verdicts(FamilyReport& r, const ReportThresholds& th) {
  const auto c_max = std::max_element(r.c_grid.begin(), r.c_grid.end()) - r.c_grid.begin();
  const auto d_min = std::min_element(r.delta_grid.begin(), r.delta_grid.end()) - r.delta_grid.begin();
  const double tail = r.tail[static_cast<std::size_t>(c_max)].mean;
  const double v = r.v[static_cast<std::size_t>(d_min)].mean;
  r.condition_i = {tail < th.tail, tail, th.tail,
                   describe("tail mass", r.c_grid[static_cast<std::size_t>(c_max)], tail, th.tail)};
  r.condition_ii = {v < th.modulus, v, th.modulus,
                    describe("modulus", r.delta_grid[static_cast<std::size_t>(d_min)], v, th.modulus)};
}

// Welford accumulator.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  Estimate estimate() const {
    if (n < 2) return {mean, 0.0};
    return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
  }
};

}  // namespace

FamilyReport precompactness_report(const std::vector<FiniteMMSpace>& family,
                                   const std::vector<double>& delta_grid,
                                   const std::vector<double>& c_grid,
                                   const ReportThresholds& thresholds) {
  if (family.empty()) {
    throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: empty family");
  }
  require_grid(delta_grid, "delta grid");
  require_grid(c_grid, "C grid");
  FamilyReport r;
  r.statistic = "sup";
  r.delta_grid = delta_grid;
  r.c_grid = c_grid;
  r.v.assign(delta_grid.size(), {});
  r.tail.assign(c_grid.size(), {});
  for (const FiniteMMSpace& x : family) {
    for (std::size_t d = 0; d < delta_grid.size(); ++d)
      r.v[d].mean = std::max(r.v[d].mean, modulus_of_mass_distribution(x, delta_grid[d]));
    const Empirical1D w = distance_distribution(x);
    for (std::size_t c = 0; c < c_grid.size(); ++c)
      r.tail[c].mean = std::max(r.tail[c].mean, w.mass_at_least(c_grid[c]));
  }
  set_verdicts(r, thresholds);
  return r;
}

TightnessReport tightness_report(const SpaceSampler& sampler, std::size_t runs,
                                 const std::vector<double>& delta_grid,
                                 const std::vector<double>& eps_grid,
                                 const std::vector<double>& c_grid, const Rng& rng,
                                 const ReportThresholds& thresholds) {
  if (runs == 0) throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: runs < 1");
  require_grid(delta_grid, "delta grid");
  require_grid(eps_grid, "eps grid");
  require_grid(c_grid, "C grid");
  const std::size_t nd = delta_grid.size(), ne = eps_grid.size(), nc = c_grid.size();
  std::vector<Moments> v(nd), tail(nc);
  std::vector<std::vector<Moments>> prob(nd, std::vector<Moments>(ne)), thin(nd, std::vector<Moments>(ne));
  for (std::size_t r = 0; r < runs; ++r) {
    Rng stream = rng.split(r);
    const FiniteMMSpace x = sampler(stream);
    for (std::size_t d = 0; d < nd; ++d) {
      const double vd = modulus_of_mass_distribution(x, delta_grid[d]);
      v[d].add(vd);
      for (std::size_t e = 0; e < ne; ++e) {
        prob[d][e].add(vd >= eps_grid[e] ? 1.0 : 0.0);
        thin[d][e].add(thin_mass(x, eps_grid[e], delta_grid[d]));
      }
    }
    const Empirical1D w = distance_distribution(x);
    for (std::size_t c = 0; c < nc; ++c) tail[c].add(w.mass_at_least(c_grid[c]));
  }
  TightnessReport out;
  out.runs = runs;
  out.eps_grid = eps_grid;
  out.family.statistic = "mean";
  out.family.delta_grid = delta_grid;
  out.family.c_grid = c_grid;
  for (const auto& m : v) out.family.v.push_back(m.estimate());
  for (const auto& m : tail) out.family.tail.push_back(m.estimate());
  out.prob_v_at_least.assign(nd, {});
  out.thin_mass.assign(nd, {});
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t e = 0; e < ne; ++e) {
      out.prob_v_at_least[d].push_back(prob[d][e].estimate());
      out.thin_mass[d].push_back(thin[d][e].estimate());
    }
  set_verdicts(out.family, thresholds);
  return out;
}

CrosscheckTable convergence_crosscheck(const std::vector<FiniteMMSpace>& sequence,
                                       const std::vector<Polynomial>& polys,
                                       double tolerance, const MetricOptions& opts) {
  if (sequence.size() < 2) {
    throw Error(ErrorKind::kPreconditionFailed,
                "PreconditionFailed: sequence needs at least two spaces");
  }
  std::vector<std::vector<double>> values(sequence.size());
  for (std::size_t s = 0; s < sequence.size(); ++s)
    for (const Polynomial& p : polys) values[s].push_back(evaluate_polynomial_exact(sequence[s], p));

  CrosscheckTable t;
  t.tolerance = tolerance;
  for (std::size_t s = 0; s + 1 < sequence.size(); ++s) {
    CrosscheckRow row{s, gromov_prohorov(sequence[s], sequence[s + 1], opts).interval,
                      eurandom(sequence[s], sequence[s + 1], opts).interval, {}};
    for (std::size_t p = 0; p < polys.size(); ++p)
      row.poly_gaps.push_back(std::abs(values[s + 1][p] - values[s][p]));
    t.rows.push_back(std::move(row));
  }
  for (std::size_t r = t.rows.size() / 2; r < t.rows.size(); ++r)
    for (double g : t.rows[r].poly_gaps) t.max_late_gap = std::max(t.max_late_gap, g);
  t.gpr_vanishing = t.rows.back().gpr.upper <= tolerance;
  t.polys_cauchy = t.max_late_gap <= tolerance;
  t.implication_holds = !t.gpr_vanishing || t.polys_cauchy;
  return t;
}

}  // namespace mmspace
