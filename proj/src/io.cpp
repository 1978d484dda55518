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

#include "mmspace/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmspace/error.hpp"
#include "mmspace/fixtures.hpp"

namespace mmspace {

namespace {

[[noreturn]] void parse_fail(const std::string& source, const std::string& field,
                             const std::string& why) {
  throw Error(ErrorKind::kParse, "Parse: " + source + ": field '" + field + "': " + why);
}

double number_at(const Json& v, const std::string& source, const std::string& field) {
  if (!v.is_number()) parse_fail(source, field, "expected a number");
  return v.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

FiniteMMSpace space_from_json(const Json& doc, const std::string& source) {
  if (!doc.is_object()) parse_fail(source, "<root>", "expected an object");
  for (const char* key : {"dist", "weights"})
    if (!doc.contains(key)) parse_fail(source, key, "missing");

  const Json& jd = doc.at("dist");
  if (!jd.is_array()) parse_fail(source, "dist", "expected an array of rows");
  const std::size_t n = jd.size();
  Matrix dist(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = "dist[" + std::to_string(i) + "]";
    if (!jd[i].is_array()) parse_fail(source, row, "expected an array");
    if (jd[i].size() != n) {
      parse_fail(source, row, "has " + std::to_string(jd[i].size()) + " entries, expected " +
                                  std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j)
      dist(i, j) = number_at(jd[i][j], source, row + "[" + std::to_string(j) + "]");
  }

  const Json& jw = doc.at("weights");
  if (!jw.is_array()) parse_fail(source, "weights", "expected an array");
  if (jw.size() != n) {
    parse_fail(source, "weights", "has " + std::to_string(jw.size()) + " entries, expected " +
                                      std::to_string(n));
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i)
    weights[i] = number_at(jw[i], source, "weights[" + std::to_string(i) + "]");

  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    const Json& jl = doc.at("labels");
    if (!jl.is_array() || jl.size() != n) {
      parse_fail(source, "labels", "expected an array of " + std::to_string(n) + " strings");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!jl[i].is_string()) parse_fail(source, "labels[" + std::to_string(i) + "]", "expected a string");
      labels.push_back(jl[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  return FiniteMMSpace(std::move(labels), std::move(dist), std::move(weights));
}

Json space_to_json(const FiniteMMSpace& space) {
  Json doc;
  doc["labels"] = space.labels();
  Json rows = Json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto r = space.dist().row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  doc["dist"] = std::move(rows);
  doc["weights"] = std::vector<double>(space.weights().begin(), space.weights().end());
  return doc;
}

FiniteMMSpace read_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "Parse: cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kParse, "Parse: " + path + ": " + e.what());
  }
  return space_from_json(doc, path);
}

void write_space(const std::string& path, const FiniteMMSpace& space) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "Parse: cannot write '" + path + "'");
  out << space_to_json(space).dump(2) << '\n';
}

FiniteMMSpace load_space(const std::string& path_or_fixture) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path_or_fixture, ec)) return read_space(path_or_fixture);
  return fixture(path_or_fixture);
}

Json witness_to_json(const MetricResult& result) {
  Json w;
  Json rows = Json::array();
  if (result.coupling) {
    w["kind"] = "coupling";
    const Matrix& pi = result.coupling->pi;
    for (std::size_t i = 0; i < pi.rows(); ++i) {
      const auto r = pi.row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
  } else if (result.relation) {
    w["kind"] = "relation";
    const Relation& rel = *result.relation;
    for (std::size_t i = 0; i < rel.rows(); ++i) {
      std::vector<int> row;
      for (std::size_t j = 0; j < rel.cols(); ++j) row.push_back(rel(i, j) ? 1 : 0);
      rows.push_back(row);
    }
  } else {
    w["kind"] = "none";
  }
  w["matrix"] = std::move(rows);
  w["objective"] = result.objective;
  return w;
}

Json to_json(const CertifiedInterval& interval) {
  return {{"lower", interval.lower},
          {"upper", interval.upper},
          {"lower_witness", to_string(interval.lower_witness)},
          {"upper_witness", to_string(interval.upper_witness)},
          {"exact", interval.exact()}};
}

Json to_json(const Empirical1D& law) {
  Json atoms = Json::array();
  for (const Atom& a : law.atoms()) atoms.push_back({a.value, a.mass});
  return {{"atoms", std::move(atoms)}};
}

Json to_json(const RandomDistanceDistribution& hat_mu) {
  Json atoms = Json::array();
  for (const LawAtom& a : hat_mu.atoms())
    atoms.push_back({{"law", to_json(a.law)["atoms"]}, {"mass", a.mass}});
  return {{"atoms", std::move(atoms)}};
}

Json to_json(const MomentMeasure& moment) {
  Json atoms = Json::array();
  for (const MomentAtom& a : moment.atoms) atoms.push_back({{"point", a.point}, {"mass", a.mass}});
  return {{"k", moment.k}, {"atoms", std::move(atoms)}};
}

namespace {

Json estimates(const std::vector<double>& grid, const std::vector<Estimate>& e,
               const char* key) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows.push_back({{key, grid[i]}, {"value", e[i].mean}, {"stderr", e[i].std_error}});
  return rows;
}

Json verdict(const ConditionVerdict& v) {
  return {{"passed", v.passed},
          {"statistic", v.statistic},
          {"threshold", v.threshold},
          {"detail", v.detail}};
}

}  // namespace

Json to_json(const FamilyReport& report) {
  return {{"statistic", report.statistic},
          {"modulus", estimates(report.delta_grid, report.v, "delta")},
          {"tail", estimates(report.c_grid, report.tail, "C")},
          {"condition_i", verdict(report.condition_i)},
          {"condition_ii", verdict(report.condition_ii)}};
}

Json to_json(const TightnessReport& report) {
  Json j = to_json(report.family);
  j["runs"] = report.runs;
  Json prob = Json::array(), thin = Json::array();
  for (std::size_t d = 0; d < report.family.delta_grid.size(); ++d)
    for (std::size_t e = 0; e < report.eps_grid.size(); ++e) {
      const double delta = report.family.delta_grid[d], eps = report.eps_grid[e];
      prob.push_back({{"delta", delta}, {"eps", eps},
                      {"value", report.prob_v_at_least[d][e].mean},
                      {"stderr", report.prob_v_at_least[d][e].std_error}});
      thin.push_back({{"delta", delta}, {"eps", eps},
                      {"value", report.thin_mass[d][e].mean},
                      {"stderr", report.thin_mass[d][e].std_error}});
    }
  j["prob_v_at_least_eps"] = std::move(prob);
  j["thin_mass"] = std::move(thin);
  return j;
}

std::string to_csv(const FamilyReport& report) {
  std::ostringstream os;
  os << "delta," << report.statistic << "_v,stderr\n";
  for (std::size_t i = 0; i < report.delta_grid.size(); ++i)
    os << format_double(report.delta_grid[i]) << ',' << format_double(report.v[i].mean) << ','
       << format_double(report.v[i].std_error) << '\n';
  os << "\nC," << report.statistic << "_tail,stderr\n";
  for (std::size_t i = 0; i < report.c_grid.size(); ++i)
    os << format_double(report.c_grid[i]) << ',' << format_double(report.tail[i].mean) << ','
       << format_double(report.tail[i].std_error) << '\n';
  return os.str();
}

}  // namespace mmspace
