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

#include "mmspace/fixtures.hpp"

#include <charconv>
#include <cmath>

#include "mmspace/error.hpp"

namespace mmspace {

namespace {

FiniteMMSpace equidistant(std::size_t n, double d, std::vector<double> weights,
                          const std::string& prefix) {
  Matrix dist(n, n, d);
  for (std::size_t i = 0; i < n; ++i) dist(i, i) = 0.0;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return FiniteMMSpace(std::move(labels), std::move(dist), std::move(weights));
}

// Leaves L1..L4 hang off one hub, R1..R4 off another; the hubs carry no
// mass and are not points of the space.
FiniteMMSpace two_clusters(const std::vector<double>& left_twentieths,
                           const std::vector<double>& right_twentieths) {
  Matrix dist(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j) dist(i, j) = (i < 4) == (j < 4) ? 2.0 : 3.0;
  std::vector<std::string> labels;
  std::vector<double> weights;
  for (std::size_t i = 0; i < 4; ++i) {
    labels.push_back("L" + std::to_string(i + 1));
    weights.push_back(left_twentieths[i] / 20.0);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    labels.push_back("R" + std::to_string(i + 1));
    weights.push_back(right_twentieths[i] / 20.0);
  }
  return FiniteMMSpace(std::move(labels), std::move(dist), std::move(weights));
}

std::size_t parameter(const std::string& name, std::size_t prefix_len,
                      std::size_t max_value) {
  const std::string text = name.substr(prefix_len);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || v < 1 ||
      v > max_value) {
    throw Error(ErrorKind::kUnknownFixture,
                "UnknownFixture: bad parameter in '" + name + "' (expected 1.." +
                    std::to_string(max_value) + ")");
  }
  return v;
}

}  // namespace

FiniteMMSpace fixture(const std::string& name) {
  if (name == "one-point") return equidistant(1, 0.0, {1.0}, "p");
  if (name == "exp25_x") return equidistant(2, 1.0, {0.5, 0.5}, "x");
  if (name == "exp25_y") {
    const double s = std::sqrt(3.0);
    return equidistant(3, 1.0, {(2.0 - s) / 6.0, 1.0 / 3.0, (2.0 + s) / 6.0}, "y");
  }
  if (name.rfind("exp212i:", 0) == 0) {
    const std::size_t n = parameter(name, 8, 1'000'000);
    return equidistant(2, static_cast<double>(n), {0.5, 0.5}, "x");
  }
  if (name.rfind("exp212ii:", 0) == 0) {
    const std::size_t n = parameter(name, 9, 12);
    const std::size_t size = std::size_t{1} << n;
    return equidistant(size, 1.0, std::vector<double>(size, 1.0 / static_cast<double>(size)), "x");
  }
  if (name == "exp62_x") return two_clusters({1, 2, 3, 4}, {1, 2, 3, 4});
  if (name == "exp62_y") return two_clusters({1, 1, 4, 4}, {2, 2, 3, 3});
  throw Error(ErrorKind::kUnknownFixture, "UnknownFixture: no fixture named '" + name + "'");
}

std::vector<std::string> fixture_names() {
  return {"one-point", "exp25_x", "exp25_y", "exp212i:n", "exp212ii:n", "exp62_x", "exp62_y"};
}

}  // namespace mmspace
