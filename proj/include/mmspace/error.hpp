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

#include <stdexcept>
#include <string>

namespace mmspace {

enum class ErrorKind {
  kDimensionMismatch,
  kNonSymmetric,
  kNonZeroDiagonal,
  kNegativeDistance,
  kTriangleViolation,
  kBadWeights,
  kTooLarge,
  kPreconditionFailed,
  kMarginalMismatch,
  kDegenerateLambda,
  kNotFullyCoalesced,
  kUnknownFixture,
  kParse,
};

const char* to_string(ErrorKind kind);

/// Base exception for every recoverable library failure. The kind lets
/// callers (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class TriangleViolation : public Error {
 public:
  TriangleViolation(std::size_t i, std::size_t j, std::size_t k,
                    const std::string& what)
      : Error(ErrorKind::kTriangleViolation, what), i_(i), j_(j), k_(k) {}

  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }
  std::size_t k() const noexcept { return k_; }

 private:
  std::size_t i_, j_, k_;
};

}  // namespace mmspace
