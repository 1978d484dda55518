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

// Command-line driver: distances between spaces, single-space functionals,
// coalescent simulation and family diagnostics.
//
// Exit codes: 0 success, 2 input error, 3 enumeration guard exceeded,
// 4 precondition failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmspace/coalescent.hpp"
#include "mmspace/diagnostics.hpp"
#include "mmspace/error.hpp"
#include "mmspace/fixtures.hpp"
#include "mmspace/functionals.hpp"
#include "mmspace/io.hpp"
#include "mmspace/metrics.hpp"

namespace {

using namespace mmspace;

constexpr int kExitInput = 2;
constexpr int kExitGuard = 3;
constexpr int kExitPrecondition = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTooLarge:
      return kExitGuard;
    case ErrorKind::kPreconditionFailed:
    case ErrorKind::kNotFullyCoalesced:
    case ErrorKind::kMarginalMismatch:
      return kExitPrecondition;
    default:
      return kExitInput;
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "Parse: bad grid value '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::kParse, "Parse: empty grid");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "Parse: cannot write '" + path + "'");
  out << text;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, std::string("Parse: MM_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

// ---------------------------------------------------------------- dist

struct DistArgs {
  std::string a, b, metric = "gpr", witness_out;
  std::optional<std::size_t> exact_limit;
};

int cmd_dist(const DistArgs& args) {
  const FiniteMMSpace x = load_space(args.a), y = load_space(args.b);
  MetricOptions opts;
  if (args.exact_limit) {
    opts.exact_cells = *args.exact_limit;
    opts.gh_exact_cells = *args.exact_limit;
  }
  MetricResult r;
  if (args.metric == "gpr") {
    r = gromov_prohorov(x, y, opts);
  } else if (args.metric == "eurandom") {
    r = eurandom(x, y, opts);
  } else if (args.metric == "gw") {
    r = gromov_wasserstein(x, y, opts);
  } else if (args.metric == "mod-eurandom") {
    r = mod_eurandom(x, y, opts);
  } else if (args.metric == "gh") {
    r = gromov_hausdorff(x, y, opts);
  } else {
    // Prohorov distance inside the gluing along the GH-optimal
    // correspondence: an exact value for that particular common space.
    const MetricResult gh = gromov_hausdorff(x, y, opts);
    const double v = prohorov_glued(x, y, *gh.relation);
    r.interval = {v, v, {Witness::Kind::kExact, "threshold scan"},
                  {Witness::Kind::kExact, "threshold scan"}};
    r.relation = gh.relation;
    r.objective = v;
  }
  std::cout << format_double(r.interval.lower) << ' ' << format_double(r.interval.upper) << ' '
            << (r.interval.exact() ? "exact" : "bounds") << '\n';
  if (!args.witness_out.empty()) write_text(args.witness_out, witness_to_json(r).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------- functional

int cmd_functional(const std::string& space_arg, const std::string& what,
                   const std::string& format) {
  const FiniteMMSpace x = load_space(space_arg);
  const bool csv = format == "csv";
  if (what == "w") {
    const Empirical1D w = distance_distribution(x);
    if (csv) {
      std::cout << "value,mass\n";
      for (const Atom& a : w.atoms())
        std::cout << format_double(a.value) << ',' << format_double(a.mass) << '\n';
    } else {
      std::cout << to_json(w).dump() << '\n';
    }
  } else if (what.rfind("vdelta:", 0) == 0) {
    const double delta = parse_grid(what.substr(7)).at(0);
    const double v = modulus_of_mass_distribution(x, delta);
    if (csv) {
      std::cout << "delta,v\n" << format_double(delta) << ',' << format_double(v) << '\n';
    } else {
      std::cout << Json{{"delta", delta}, {"v", v}}.dump() << '\n';
    }
  } else if (what == "hatmu") {
    std::cout << to_json(random_distance_distribution(x)).dump() << '\n';
  } else if (what.rfind("moment:", 0) == 0) {
    const double k = parse_grid(what.substr(7)).at(0);
    if (k < 1 || k != static_cast<double>(static_cast<std::size_t>(k))) {
      throw Error(ErrorKind::kParse, "Parse: moment order must be a positive integer");
    }
    std::cout << to_json(moment_measure(x, static_cast<std::size_t>(k))).dump() << '\n';
  } else {
    throw Error(ErrorKind::kParse, "Parse: unknown functional '" + what + "'");
  }
  return 0;
}

// ---------------------------------------------------------- coalescent

struct CoalescentArgs {
  std::string lambda = "kingman", emit = "mmspace", out, delta_grid = "0.001,0.01,0.1,1";
  std::size_t n = 10, runs = 1, bins = 20;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_max;
  double t = 0.1;
};

int cmd_coalescent(const CoalescentArgs& args) {
  const LambdaMeasure lambda = LambdaMeasure::parse(args.lambda);
  std::cerr << to_string(dust_classifier(lambda)) << '\n';
  const Rng root(resolve_seed(args.seed));
  if (args.runs == 0) throw Error(ErrorKind::kParse, "Parse: --runs must be positive");
  std::string output;

  if (args.emit == "ball-mass") {
    const BallMassCurve c = empirical_ball_mass_curve(lambda, args.n, args.t,
                                                      parse_grid(args.delta_grid), args.runs, root);
    Json rows = Json::array();
    for (std::size_t i = 0; i < c.delta.size(); ++i)
      rows.push_back({{"delta", c.delta[i]}, {"estimate", c.estimate[i]}, {"stderr", c.std_error[i]}});
    output = Json{{"t", args.t}, {"n", args.n}, {"runs", args.runs}, {"curve", rows}}.dump(2);
  } else {
    MergerTable table(lambda);
    Json spaces = Json::array(), log = Json::array();
    std::vector<double> distances;  // distinct-pair distances, all runs
    for (std::size_t r = 0; r < args.runs; ++r) {
      Rng stream = root.split(r);
      const CoalescentRun run = simulate(table, args.n, stream, args.t_max);
      if (args.emit == "run-log") {
        Json events = Json::array();
        for (const MergeEvent& e : run.events) events.push_back({{"time", e.time}, {"blocks", e.blocks}});
        log.push_back({{"run", r}, {"events", std::move(events)},
                       {"final_blocks", run.final_state.blocks.size()}});
        continue;
      }
      const FiniteMMSpace x = coalescent_to_mmspace(run);
      if (args.emit == "mmspace") {
        spaces.push_back(space_to_json(x));
      } else if (args.emit == "w-hist") {
        for (std::size_t i = 0; i < x.size(); ++i)
          for (std::size_t j = i + 1; j < x.size(); ++j) distances.push_back(x.distance(i, j));
      } else {
        throw Error(ErrorKind::kParse, "Parse: unknown --emit value '" + args.emit + "'");
      }
    }
    if (args.emit == "run-log") {
      output = log.dump(2);
    } else if (args.emit == "mmspace") {
      output = args.runs == 1 ? spaces.front().dump(2) : Json{{"spaces", spaces}}.dump(2);
    } else {
      double sum = 0.0, hi = 0.0;
      for (double d : distances) {
        sum += d;
        hi = std::max(hi, d);
      }
      const std::size_t bins = std::max<std::size_t>(1, args.bins);
      std::vector<std::size_t> counts(bins, 0);
      std::vector<double> edges;
      for (std::size_t b = 0; b <= bins; ++b) edges.push_back(hi * static_cast<double>(b) / static_cast<double>(bins));
      for (double d : distances) {
        const auto b = hi > 0.0 ? static_cast<std::size_t>(d / hi * static_cast<double>(bins)) : 0;
        ++counts[std::min(b, bins - 1)];
      }
      output = Json{{"n", args.n},
                    {"runs", args.runs},
                    {"pairs", distances.size()},
                    {"mean_distinct_pair_distance", distances.empty() ? 0.0 : sum / static_cast<double>(distances.size())},
                    {"edges", edges},
                    {"counts", counts}}
                   .dump(2);
    }
  }
  if (args.out.empty()) {
    std::cout << output << '\n';
  } else {
    write_text(args.out, output + "\n");
  }
  return 0;
}

// ------------------------------------------------------------ diagnose

struct DiagnoseArgs {
  std::vector<std::string> items;
  std::string sampler, delta_grid = "0.5,0.25,0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625",
                       eps_grid = "0.05,0.1,0.25", c_grid = "1,2,3,4,5", out;
  std::size_t n = 100, runs = 20;
  std::optional<std::uint64_t> seed;
  double tail_threshold = 0.1, v_threshold = 0.1;
};

// "name:a..b" expands to name:a, ..., name:b.
std::vector<FiniteMMSpace> expand_family(const std::vector<std::string>& items) {
  std::vector<FiniteMMSpace> family;
  for (const std::string& item : items) {
    const auto colon = item.rfind(':');
    const auto dots = item.find("..", colon == std::string::npos ? 0 : colon);
    if (colon != std::string::npos && dots != std::string::npos) {
      const std::string stem = item.substr(0, colon + 1);
      std::size_t lo = 0, hi = 0;
      try {
        lo = std::stoul(item.substr(colon + 1, dots - colon - 1));
        hi = std::stoul(item.substr(dots + 2));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse, "Parse: bad range in '" + item + "'");
      }
      for (std::size_t k = lo; k <= hi; ++k) family.push_back(load_space(stem + std::to_string(k)));
    } else {
      family.push_back(load_space(item));
    }
  }
  return family;
}

int cmd_diagnose(const DiagnoseArgs& args) {
  const ReportThresholds th{args.tail_threshold, args.v_threshold};
  const auto deltas = parse_grid(args.delta_grid), cs = parse_grid(args.c_grid);
  Json json;
  FamilyReport family;
  if (!args.sampler.empty()) {
    const LambdaMeasure lambda = LambdaMeasure::parse(args.sampler);
    auto table = std::make_shared<MergerTable>(lambda);
    const std::size_t n = args.n;
    const SpaceSampler sampler = [table, n](Rng& rng) {
      return coalescent_to_mmspace(simulate(*table, n, rng));
    };
    const TightnessReport t = tightness_report(sampler, args.runs, deltas,
                                               parse_grid(args.eps_grid), cs,
                                               Rng(resolve_seed(args.seed)), th);
    json = to_json(t);
    family = t.family;
  } else {
    if (args.items.empty()) throw Error(ErrorKind::kParse, "Parse: no spaces given");
    family = precompactness_report(expand_family(args.items), deltas, cs, th);
    json = to_json(family);
  }
  std::cout << "condition (i): " << (family.condition_i.passed ? "PASS" : "FAIL") << " ("
            << family.condition_i.detail << ")\n"
            << "condition (ii): " << (family.condition_ii.passed ? "PASS" : "FAIL") << " ("
            << family.condition_ii.detail << ")\n";
  if (!args.out.empty()) {
    write_text(args.out + ".json", json.dump(2) + "\n");
    write_text(args.out + ".csv", to_csv(family));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite metric measure spaces: functionals, distances, coalescent trees"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* d = app.add_subcommand("dist", "Certified distance interval between two spaces");
  d->add_option("a", dist.a, "First space (file or fixture name)")->required();
  d->add_option("b", dist.b, "Second space (file or fixture name)")->required();
  d->add_option("--metric", dist.metric, "prohorov-glued|gpr|eurandom|gw|mod-eurandom|gh")
      ->check(CLI::IsMember({"prohorov-glued", "gpr", "eurandom", "gw", "mod-eurandom", "gh"}));
  d->add_option("--exact-limit", dist.exact_limit, "Largest n*m solved exactly");
  d->add_option("--witness-out", dist.witness_out, "Write the upper-bound witness as JSON");

  std::string space_arg, what = "w", format = "json";
  auto* f = app.add_subcommand("functional", "Single-space functional");
  f->add_option("space", space_arg, "Space (file or fixture name)")->required();
  f->add_option("--what", what, "w | vdelta:<delta> | hatmu | moment:<k>");
  f->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  CoalescentArgs co;
  auto* c = app.add_subcommand("coalescent", "Simulate Lambda-coalescent trees");
  c->add_option("--lambda", co.lambda, "kingman | bolthausen-sznitman | beta:a,b[,mass] | atom:x,mass, joined by +");
  c->add_option("--n", co.n, "Sample size")->check(CLI::Range(2, 1'000'000));
  c->add_option("--runs", co.runs, "Number of independent runs");
  c->add_option("--seed", co.seed, "Seed (falls back to MM_SEED, then 1)");
  c->add_option("--t-max", co.t_max, "Stop each run at this time");
  c->add_option("--emit", co.emit, "mmspace | w-hist | ball-mass | run-log")
      ->check(CLI::IsMember({"mmspace", "w-hist", "ball-mass", "run-log"}));
  c->add_option("--t", co.t, "Ball radius for ball-mass");
  c->add_option("--delta-grid", co.delta_grid, "Comma-separated deltas for ball-mass");
  c->add_option("--bins", co.bins, "Histogram bins for w-hist");
  c->add_option("--out", co.out, "Output file (default stdout)");

  DiagnoseArgs dg;
  auto* g = app.add_subcommand("diagnose", "Precompactness or tightness report");
  g->add_option("spaces", dg.items, "Spaces, fixtures or ranges like exp212i:1..8");
  g->add_option("--sampler", dg.sampler, "Lambda measure: report tightness of coalescent trees");
  g->add_option("--n", dg.n, "Sampler tree size");
  g->add_option("--runs", dg.runs, "Sampler runs");
  g->add_option("--seed", dg.seed, "Seed (falls back to MM_SEED, then 1)");
  g->add_option("--delta-grid", dg.delta_grid, "Comma-separated deltas");
  g->add_option("--eps-grid", dg.eps_grid, "Comma-separated epsilons (sampler mode)");
  g->add_option("--c-grid", dg.c_grid, "Comma-separated tail cut-offs C");
  g->add_option("--tail-threshold", dg.tail_threshold, "Threshold for condition (i)");
  g->add_option("--v-threshold", dg.v_threshold, "Threshold for condition (ii)");
  g->add_option("--out", dg.out, "Write <out>.json and <out>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*d) return cmd_dist(dist);
    if (*f) return cmd_functional(space_arg, what, format);
    if (*c) return cmd_coalescent(co);
    if (*g) return cmd_diagnose(dg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: TooLarge: out of memory\n";
    return exit_code_for(ErrorKind::kTooLarge);
  }
  return 0;
}
