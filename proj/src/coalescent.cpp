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

#include "mmspace/coalescent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mmspace/error.hpp"

namespace mmspace {

namespace {

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double lchoose(std::size_t b, std::size_t k) {
  return std::lgamma(static_cast<double>(b) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(b - k) + 1.0);
}

// Compensated summation; the catalog mixes terms of very different size.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// C(b,k)^choose * lambda_{b,k}, with every component evaluated in log space
// so that large b neither overflows the binomial nor underflows the rate.
double weighted_rate(const LambdaMeasure& l, std::size_t b, std::size_t k,
                     bool with_binomial) {
  const double lc = with_binomial ? lchoose(b, k) : 0.0;
  const double db = static_cast<double>(b), dk = static_cast<double>(k);
  KahanSum s;
  if (k == 2 && l.atom0 > 0.0) s.add(l.atom0 * std::exp(lc));
  if (k == b && l.atom1 > 0.0) s.add(l.atom1 * std::exp(lc));
  for (const BetaComponent& c : l.betas) {
    s.add(std::exp(lc + std::log(c.mass) + lbeta(c.a + dk - 2.0, c.b + db - dk) -
                   lbeta(c.a, c.b)));
  }
  for (const InteriorAtom& a : l.atoms) {
    s.add(std::exp(lc + std::log(a.mass) + (dk - 2.0) * std::log(a.x) +
                   (db - dk) * std::log1p(-a.x)));
  }
  return s.value();
}

double parse_number(const std::string& text, const std::string& source) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorKind::kParse,
                "Parse: bad number '" + text + "' in lambda string '" + source + "'");
  }
  return v;
}

std::vector<double> parse_args(const std::string& args, const std::string& source) {
  std::vector<double> out;
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, source));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LambdaMeasure

double LambdaMeasure::total_mass() const {
  KahanSum s;
  s.add(atom0);
  s.add(atom1);
  for (const auto& c : betas) s.add(c.mass);
  for (const auto& a : atoms) s.add(a.mass);
  return s.value();
}

LambdaMeasure LambdaMeasure::kingman() {
  LambdaMeasure l;
  l.atom0 = 1.0;
  return l;
}

LambdaMeasure LambdaMeasure::bolthausen_sznitman() { return beta(1.0, 1.0); }

LambdaMeasure LambdaMeasure::beta(double a, double b, double mass) {
  LambdaMeasure l;
  l.betas.push_back({a, b, mass});
  return l;
}

LambdaMeasure LambdaMeasure::parse(const std::string& source) {
  LambdaMeasure out;
  std::stringstream ss(source);
  std::string term;
  bool any = false;
  while (std::getline(ss, term, '+')) {
    term.erase(0, term.find_first_not_of(" \t"));
    term.erase(term.find_last_not_of(" \t") + 1);
    if (term.empty()) continue;
    any = true;
    if (term == "kingman") {
      out.atom0 += 1.0;
    } else if (term == "bolthausen-sznitman") {
      out.betas.push_back({1.0, 1.0, 1.0});
    } else if (term.rfind("beta:", 0) == 0) {
      const auto v = parse_args(term.substr(5), source);
      if (v.size() != 2 && v.size() != 3) {
        throw Error(ErrorKind::kParse, "Parse: beta term needs a,b[,mass] in '" + source + "'");
      }
      out.betas.push_back({v[0], v[1], v.size() == 3 ? v[2] : 1.0});
    } else if (term.rfind("atom:", 0) == 0) {
      const auto v = parse_args(term.substr(5), source);
      if (v.size() != 2) {
        throw Error(ErrorKind::kParse, "Parse: atom term needs x,mass in '" + source + "'");
      }
      if (v[0] == 0.0) {
        out.atom0 += v[1];
      } else if (v[0] == 1.0) {
        out.atom1 += v[1];
      } else {
        out.atoms.push_back({v[0], v[1]});
      }
    } else {
      throw Error(ErrorKind::kParse, "Parse: unknown lambda term '" + term + "'");
    }
  }
  if (!any) throw Error(ErrorKind::kParse, "Parse: empty lambda string");
  out.validate();
  return out;
}

void LambdaMeasure::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorKind::kDegenerateLambda, "DegenerateLambda: " + why);
  };
  if (!(atom0 >= 0.0) || !(atom1 >= 0.0)) fail("negative boundary atom");
  for (const auto& c : betas) {
    if (!(c.a > 0.0) || !(c.b > 0.0)) fail("Beta parameters must be positive");
    if (!(c.mass >= 0.0)) fail("negative Beta component mass");
  }
  for (const auto& a : atoms) {
    if (!(a.x > 0.0 && a.x < 1.0)) fail("interior atom outside (0,1)");
    if (!(a.mass >= 0.0)) fail("negative atom mass");
  }
  const double total = total_mass();
  if (!(total > 0.0) || !std::isfinite(total)) fail("total mass must be positive and finite");
}

double lambda_rate(const LambdaMeasure& lambda, std::size_t b, std::size_t k) {
  if (k < 2 || k > b) {
    throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: need 2 <= k <= b");
  }
  return weighted_rate(lambda, b, k, false);
}

double total_merge_rate(const LambdaMeasure& lambda, std::size_t b) {
  if (b < 2) {
    throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: need b >= 2");
  }
  KahanSum s;
  for (std::size_t k = 2; k <= b; ++k) s.add(weighted_rate(lambda, b, k, true));
  return s.value();
}

// ---------------------------------------------------------------------------
// Partitions and runs

PartitionState PartitionState::singletons(std::size_t n) {
  PartitionState p;
  p.blocks.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.blocks[i] = {i};
  return p;
}

void PartitionState::merge(const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> idx = indices;
  std::sort(idx.begin(), idx.end());
  // Blocks are ordered by least element, so the lowest index keeps the
  // least element of the union and the order survives the erasures.
  auto& target = blocks[idx.front()];
  for (std::size_t t = 1; t < idx.size(); ++t) {
    const auto& src = blocks[idx[t]];
    target.insert(target.end(), src.begin(), src.end());
  }
  std::sort(target.begin(), target.end());
  for (std::size_t t = idx.size(); t-- > 1;) blocks.erase(blocks.begin() + idx[t]);
}

std::size_t PartitionState::block_of(std::size_t individual) const {
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (std::binary_search(blocks[b].begin(), blocks[b].end(), individual)) return b;
  throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: individual out of range");
}

PartitionState CoalescentRun::state_at(double t) const {
  PartitionState p = PartitionState::singletons(n);
  for (const MergeEvent& e : events) {
    if (e.time > t) break;
    p.merge(e.blocks);
  }
  return p;
}

MergerTable::MergerTable(LambdaMeasure lambda) : lambda_(std::move(lambda)) {
  lambda_.validate();
}

void MergerTable::ensure(std::size_t b) {
  if (cumulative_.size() <= b) cumulative_.resize(b + 1);
  auto& row = cumulative_[b];
  if (!row.empty()) return;
  row.reserve(b - 1);
  KahanSum s;
  for (std::size_t k = 2; k <= b; ++k) {
    s.add(weighted_rate(lambda_, b, k, true));
    row.push_back(s.value());
  }
}

double MergerTable::total_rate(std::size_t b) {
  ensure(b);
  return cumulative_[b].back();
}

std::size_t MergerTable::sample_k(std::size_t b, Rng& rng) {
  ensure(b);
  const auto& row = cumulative_[b];
  const double u = rng.uniform() * row.back();
  const auto it = std::upper_bound(row.begin(), row.end(), u);
  const auto offset = std::min<std::size_t>(static_cast<std::size_t>(it - row.begin()),
                                            row.size() - 1);
  return offset + 2;
}

CoalescentRun simulate(MergerTable& table, std::size_t n, Rng& rng,
                       std::optional<double> t_max) {
  if (n < 2) throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: need n >= 2");
  CoalescentRun run;
  run.n = n;
  run.final_state = PartitionState::singletons(n);
  double time = 0.0;
  std::vector<std::size_t> order;
  while (run.final_state.blocks.size() > 1) {
    const std::size_t b = run.final_state.blocks.size();
    const double rate = table.total_rate(b);
    if (!(rate > 0.0)) {
      throw Error(ErrorKind::kDegenerateLambda, "DegenerateLambda: zero merge rate");
    }
    time += rng.exponential(rate);
    if (t_max && time > *t_max) break;
    const std::size_t k = table.sample_k(b, rng);
    // Partial Fisher-Yates: the first k entries form a uniform k-subset.
    order.resize(b);
    for (std::size_t i = 0; i < b; ++i) order[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(b - i)]);
    std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<long>(k));
    std::sort(chosen.begin(), chosen.end());
    run.final_state.merge(chosen);
    run.events.push_back({time, std::move(chosen)});
  }
  return run;
}

CoalescentRun simulate(const LambdaMeasure& lambda, std::size_t n, Rng& rng,
                       std::optional<double> t_max) {
  MergerTable table(lambda);
  return simulate(table, n, rng, t_max);
}

FiniteMMSpace coalescent_to_mmspace(const CoalescentRun& run) {
  if (!run.fully_coalesced()) {
    throw Error(ErrorKind::kNotFullyCoalesced,
                "NotFullyCoalesced: run stopped with " +
                    std::to_string(run.final_state.blocks.size()) + " blocks");
  }
  Matrix dist(run.n, run.n);
  PartitionState p = PartitionState::singletons(run.n);
  for (const MergeEvent& e : run.events) {
    for (std::size_t a = 0; a < e.blocks.size(); ++a)
      for (std::size_t c = a + 1; c < e.blocks.size(); ++c)
        for (std::size_t i : p.blocks[e.blocks[a]])
          for (std::size_t j : p.blocks[e.blocks[c]]) {
            dist(i, j) = e.time;
            dist(j, i) = e.time;
          }
    p.merge(e.blocks);
  }
  if (!is_ultrametric(dist)) {
    throw std::logic_error("coalescent distances are not ultrametric");
  }
  return FiniteMMSpace::uniform(std::move(dist));
}

// ---------------------------------------------------------------------------
// Dust

const char* to_string(DustClass c) {
  return c == DustClass::kDustFree ? "DustFree" : "Dust";
}

DustClass dust_classifier(const LambdaMeasure& lambda) {
  if (lambda.atom0 > 0.0) return DustClass::kDustFree;
  for (const auto& c : lambda.betas)
    if (c.mass > 0.0 && c.a <= 1.0) return DustClass::kDustFree;
  return DustClass::kDust;
}

QuadratureProbe dust_quadrature_probe(const LambdaMeasure& lambda, std::size_t shells) {
  QuadratureProbe probe{DustClass::kDust, std::vector<double>(shells, 0.0), 0.0};
  if (lambda.atom0 > 0.0) {
    probe.verdict = DustClass::kDustFree;
    probe.tail_ratio = std::numeric_limits<double>::infinity();
    std::fill(probe.shells.begin(), probe.shells.end(),
              std::numeric_limits<double>::infinity());
    return probe;
  }
  using boost::math::quadrature::gauss_kronrod;
  for (std::size_t s = 0; s < shells; ++s) {
    const double hi = std::ldexp(1.0, -static_cast<int>(s));
    const double lo = hi / 2.0;
    double total = 0.0;
    for (const auto& c : lambda.betas) {
      const double log_norm = std::log(c.mass) - lbeta(c.a, c.b);
      // x = lo (1 + u) maps every shell onto [0, 1], keeping the integrand
      // O(1) so the error estimate stays meaningful deep into the tail.
      auto f = [&](double u) {
        const double x = lo * (1.0 + u);
        return lo * std::exp(log_norm + (c.a - 2.0) * std::log(x) + (c.b - 1.0) * std::log1p(-x));
      };
      total += gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-12);
    }
    for (const auto& a : lambda.atoms)
      if (a.x > lo && a.x <= hi) total += a.mass / a.x;
    if (s == 0) total += lambda.atom1;
    probe.shells[s] = total;
  }
  const double last = probe.shells[shells - 1], prev = probe.shells[shells - 2];
  probe.tail_ratio = prev > 0.0 ? last / prev : 0.0;
  // Convergent tails decay geometrically (ratio 2^(1-a) for a Beta(a, .)
  // component); divergent ones stay level or grow.
  probe.verdict = probe.tail_ratio >= 1.0 - 1e-3 ? DustClass::kDustFree : DustClass::kDust;
  return probe;
}

double singleton_frequency(const CoalescentRun& run, double t, std::size_t i) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kPreconditionFailed, "PreconditionFailed: t < 0");
  const PartitionState p = run.state_at(t);
  return static_cast<double>(p.blocks[p.block_of(i)].size()) / static_cast<double>(run.n);
}

BallMassCurve empirical_ball_mass_curve(const LambdaMeasure& lambda, std::size_t n,
                                        double t, const std::vector<double>& delta_grid,
                                        std::size_t runs, const Rng& rng) {
  if (delta_grid.empty() || runs == 0) {
    throw Error(ErrorKind::kPreconditionFailed,
                "PreconditionFailed: empty delta grid or zero runs");
  }
  MergerTable table(lambda);
  const std::size_t g = delta_grid.size();
  std::vector<double> sum(g, 0.0), sum_sq(g, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng stream = rng.split(r);
    // The open ball of radius t around x is the block of x just before t.
    const CoalescentRun run = simulate(table, n, stream, t);
    for (std::size_t d = 0; d < g; ++d) {
      const double limit = delta_grid[d] * static_cast<double>(n) + 1e-9;
      std::size_t thin = 0;
      for (const auto& block : run.final_state.blocks)
        if (static_cast<double>(block.size()) <= limit) thin += block.size();
      const double v = static_cast<double>(thin) / static_cast<double>(n);
      sum[d] += v;
      sum_sq[d] += v * v;
    }
  }
  BallMassCurve out{delta_grid, std::vector<double>(g), std::vector<double>(g)};
  const double R = static_cast<double>(runs);
  for (std::size_t d = 0; d < g; ++d) {
    const double mean = sum[d] / R;
    out.estimate[d] = mean;
    const double var = runs > 1 ? std::max(0.0, (sum_sq[d] - R * mean * mean) / (R - 1.0)) : 0.0;
    out.std_error[d] = std::sqrt(var / R);
  }
  return out;
}

}  // namespace mmspace
