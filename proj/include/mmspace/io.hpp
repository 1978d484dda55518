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

#include <string>

#include "json.hpp"
#include "mmspace/diagnostics.hpp"
#include "mmspace/functionals.hpp"
#include "mmspace/metrics.hpp"
#include "mmspace/space.hpp"

namespace mmspace {

using Json = nlohmann::json;

/// Builds a space from {"labels": [...], "dist": [[...]], "weights": [...]}
/// ("meta" is ignored). Structural problems throw ErrorKind::kParse with a
/// message naming `source` and the offending field, e.g. "dist[2][0]";
/// invariant violations throw the validation error of FiniteMMSpace.
FiniteMMSpace space_from_json(const Json& doc, const std::string& source = "<json>");
Json space_to_json(const FiniteMMSpace& space);

/// Reads a space document from disk. Syntax errors carry line and column.
FiniteMMSpace read_space(const std::string& path);
void write_space(const std::string& path, const FiniteMMSpace& space);

/// A path to an existing file is read as a document; anything else is
/// looked up as a fixture name.
FiniteMMSpace load_space(const std::string& path_or_fixture);

/// {"kind": "coupling"|"relation", "matrix": [[...]], "objective": v}
Json witness_to_json(const MetricResult& result);

Json to_json(const CertifiedInterval& interval);
Json to_json(const Empirical1D& law);
Json to_json(const RandomDistanceDistribution& hat_mu);
Json to_json(const MomentMeasure& moment);
Json to_json(const FamilyReport& report);
Json to_json(const TightnessReport& report);

/// CSV with header "delta,v,stderr" followed by "C,tail,stderr" rows in a
/// second section.
std::string to_csv(const FamilyReport& report);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace mmspace
