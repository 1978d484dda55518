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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mmspace/error.hpp"
#include "mmspace/fixtures.hpp"
#include "mmspace/io.hpp"
#include "support.hpp"

using namespace mmspace;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mmspace_io_" + name)).string();
}

std::string parse_message(const std::string& text) {
  try {
    space_from_json(Json::parse(text), "doc.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("write then read is bit exact") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    auto base = testing::random_space(rng, 1 + rng.below(6));
    // Irrational-looking distances and weights.
    Matrix d = base.dist();
    for (double& v : d.data()) v *= std::sqrt(2.0) / 3.0;
    const FiniteMMSpace x = FiniteMMSpace::unlabelled(d, {base.weights().begin(), base.weights().end()});
    const std::string path = temp_path("roundtrip.json");
    write_space(path, x);
    CHECK(read_space(path) == x);
    std::remove(path.c_str());
  }
  const auto y = fixture("exp25_y");
  CHECK(space_from_json(space_to_json(y)) == y);
}

TEST_CASE("field-addressed errors") {
  CHECK(parse_message(R"({"weights": [1]})").find("'dist'") != std::string::npos);
  CHECK(parse_message(R"({"dist": [[0, 1], [1, "a"]], "weights": [0.5, 0.5]})").find("dist[1][1]") != std::string::npos);
  CHECK(parse_message(R"({"dist": [[0, 1], [1]], "weights": [0.5, 0.5]})").find("dist[1]") != std::string::npos);
  CHECK(parse_message(R"({"dist": [[0]], "weights": [0.5, 0.5]})").find("weights") != std::string::npos);
  CHECK(parse_message(R"({"dist": [[0]], "weights": [1], "labels": [3]})").find("labels") != std::string::npos);
  CHECK(parse_message("[1, 2]").find("<root>") != std::string::npos);
}

TEST_CASE("syntax errors report the position") {
  const std::string path = temp_path("broken.json");
  std::ofstream(path) << "{\n  \"dist\": [[0]],\n  \"weights\": [1,]\n}\n";
  try {
    read_space(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("invalid spaces keep their validation error") {
  try {
    space_from_json(Json::parse(R"({"dist": [[0, 1], [2, 0]], "weights": [0.5, 0.5]})"));
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNonSymmetric);
  }
}

TEST_CASE("meta is ignored and labels default to indices") {
  const auto x = space_from_json(Json::parse(R"({"dist": [[0]], "weights": [1], "meta": {"k": 1}})"));
  CHECK(x.labels() == std::vector<std::string>{"0"});
}

TEST_CASE("load_space falls back to fixtures") {
  CHECK(load_space("exp25_x") == fixture("exp25_x"));
  CHECK_THROWS_AS(load_space("no-such-thing"), Error);
}

TEST_CASE("witness export") {
  MetricResult r;
  r.coupling = Coupling::product(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0});
  r.objective = 0.25;
  const Json w = witness_to_json(r);
  CHECK(w["kind"] == "coupling");
  CHECK(w["matrix"] == Json::parse("[[0.5],[0.5]]"));
  CHECK(w["objective"] == 0.25);
  MetricResult s;
  s.relation = Relation::identity(2);
  CHECK(witness_to_json(s)["matrix"] == Json::parse("[[1,0],[0,1]]"));
}

TEST_CASE("report csv") {
  FamilyReport r;
  r.statistic = "sup";
  r.delta_grid = {0.5};
  r.v = {{1.0, 0.0}};
  r.c_grid = {2.0};
  r.tail = {{0.25, 0.0}};
  CHECK(to_csv(r) == "delta,sup_v,stderr\n0.5,1,0\n\nC,sup_tail,stderr\n2,0.25,0\n");
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_double(std::sqrt(2.0))) == std::sqrt(2.0));
}
