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
#include <vector>

#include "mmspace/space.hpp"

namespace mmspace {

/// Named example spaces:
///   one-point      a single point
///   exp25_x        2 points at distance 1, masses 1/2, 1/2
///   exp25_y        3 points at mutual distance 1, masses (2-sqrt3)/6,
///                  1/3, (2+sqrt3)/6
///   exp212i:n      2 points at distance n, masses 1/2, 1/2
///   exp212ii:n     2^n points at mutual distance 1, uniform masses (n <= 12)
///   exp62_x/_y     two clusters of four leaves (distance 2 within a
///                  cluster, 3 across) with masses in twentieths
/// Throws ErrorKind::kUnknownFixture for any other name.
FiniteMMSpace fixture(const std::string& name);

/// Names accepted by fixture(); parameterised families are listed with
/// their ":n" suffix.
std::vector<std::string> fixture_names();

}  // namespace mmspace
