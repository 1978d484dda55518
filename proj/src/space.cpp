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

#include "mmspace/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mmspace/error.hpp"

namespace mmspace {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonSymmetric: return "NonSymmetric";
    case ErrorKind::kNonZeroDiagonal: return "NonZeroDiagonal";
    case ErrorKind::kNegativeDistance: return "NegativeDistance";
    case ErrorKind::kTriangleViolation: return "TriangleViolation";
    case ErrorKind::kBadWeights: return "BadWeights";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kPreconditionFailed: return "PreconditionFailed";
    case ErrorKind::kMarginalMismatch: return "MarginalMismatch";
    case ErrorKind::kDegenerateLambda: return "DegenerateLambda";
    case ErrorKind::kNotFullyCoalesced: return "NotFullyCoalesced";
    case ErrorKind::kUnknownFixture: return "UnknownFixture";
    case ErrorKind::kParse: return "Parse";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, std::string(to_string(kind)) + ": " + msg);
}

void check_triangle(const Matrix& d) {
  if (is_ultrametric(d)) return;
  const std::size_t n = d.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = d(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        if (dij > d(i, k) + d(k, j) + kTriangleTolerance) {
          std::ostringstream os;
          os << "TriangleViolation: d(" << i << "," << j << ") = " << dij
             << " > d(" << i << "," << k << ") + d(" << k << "," << j
             << ") = " << d(i, k) + d(k, j);
          throw TriangleViolation(i, j, k, os.str());
        }
      }
    }
  }
}

}  // namespace

void validate_space(const Matrix& dist, std::span<const double> weights,
                    std::size_t label_count) {
  const std::size_t n = weights.size();
  if (n == 0) fail(ErrorKind::kDimensionMismatch, "space has no points");
  if (dist.rows() != n || dist.cols() != n || label_count != n) {
    std::ostringstream os;
    os << "dist is " << dist.rows() << "x" << dist.cols() << ", weights "
       << n << ", labels " << label_count;
    fail(ErrorKind::kDimensionMismatch, os.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      std::ostringstream os;
      os << "dist(" << i << "," << i << ") = " << dist(i, i);
      fail(ErrorKind::kNonZeroDiagonal, os.str());
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream os;
        os << "dist(" << i << "," << j << ") = " << v;
        fail(ErrorKind::kNegativeDistance, os.str());
      }
      if (std::abs(v - dist(j, i)) > kTriangleTolerance) {
        std::ostringstream os;
        os << "dist(" << i << "," << j << ") = " << v << " but dist(" << j
           << "," << i << ") = " << dist(j, i);
        fail(ErrorKind::kNonSymmetric, os.str());
      }
    }
  }
  check_triangle(dist);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      std::ostringstream os;
      os << "weight " << i << " = " << weights[i] << " is not positive";
      fail(ErrorKind::kBadWeights, os.str());
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total;
    fail(ErrorKind::kBadWeights, os.str());
  }
}

FiniteMMSpace::FiniteMMSpace(std::vector<std::string> labels, Matrix dist,
                             std::vector<double> weights)
    : labels_(std::move(labels)),
      dist_(std::move(dist)),
      weights_(std::move(weights)) {
  validate_space(dist_, weights_, labels_.size());
}

FiniteMMSpace FiniteMMSpace::unlabelled(Matrix dist,
                                        std::vector<double> weights) {
  std::vector<std::string> labels(weights.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
  return FiniteMMSpace(std::move(labels), std::move(dist), std::move(weights));
}

FiniteMMSpace FiniteMMSpace::uniform(Matrix dist) {
  const std::size_t n = dist.rows();
  return unlabelled(std::move(dist),
                    std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double FiniteMMSpace::diameter() const {
  double best = 0.0;
  for (double v : dist_.data()) best = std::max(best, v);
  return best;
}

bool is_ultrametric(const Matrix& dist, double tol) {
  const std::size_t n = dist.rows();
  if (n <= 2) return true;
  // Prim's algorithm on the complete graph.
  std::vector<double> key(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<bool> in_tree(n, false);
  std::vector<std::vector<std::size_t>> children(n);
  key[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (u == n || key[v] < key[u])) u = v;
    in_tree[u] = true;
    if (parent[u] != n) {
      children[parent[u]].push_back(u);
      children[u].push_back(parent[u]);
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && dist(u, v) < key[v]) {
        key[v] = dist(u, v);
        parent[v] = u;
      }
    }
  }
  // Minimax path distance from every source; equals dist iff ultrametric.
  std::vector<double> minimax(n);
  std::vector<std::size_t> stack;
  std::vector<bool> seen(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(seen.begin(), seen.end(), false);
    minimax[s] = 0.0;
    seen[s] = true;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : children[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        minimax[v] = std::max(minimax[u], dist(u, v));
        stack.push_back(v);
      }
    }
    for (std::size_t t = 0; t < n; ++t)
      if (std::abs(minimax[t] - dist(s, t)) > tol) return false;
  }
  return true;
}

bool is_ultrametric_bruteforce(const Matrix& dist, double tol) {
  const std::size_t n = dist.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (dist(i, j) > std::max(dist(i, k), dist(k, j)) + tol) return false;
  return true;
}

FiniteMMSpace canonicalize(const FiniteMMSpace& space) {
  const std::size_t n = space.size();
  std::vector<std::size_t> rep(n);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    rep[i] = i;
    for (std::size_t k : keep) {
      if (space.distance(i, k) == 0.0) {
        rep[i] = k;
        break;
      }
    }
    if (rep[i] == i) keep.push_back(i);
  }
  Matrix dist(keep.size(), keep.size());
  std::vector<double> weights(keep.size(), 0.0);
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < keep.size(); ++a) {
    labels.push_back(space.labels()[keep[a]]);
    for (std::size_t b = 0; b < keep.size(); ++b)
      dist(a, b) = space.distance(keep[a], keep[b]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto pos = std::find(keep.begin(), keep.end(), rep[i]) - keep.begin();
    weights[static_cast<std::size_t>(pos)] += space.weight(i);
  }
  return FiniteMMSpace(std::move(labels), std::move(dist), std::move(weights));
}

namespace {

bool extend_isomorphism(const FiniteMMSpace& x, const FiniteMMSpace& y,
                        std::vector<std::size_t>& image,
                        std::vector<bool>& used, double tol) {
  const std::size_t i = image.size();
  if (i == x.size()) return true;
  for (std::size_t p = 0; p < y.size(); ++p) {
    if (used[p] || std::abs(x.weight(i) - y.weight(p)) > tol) continue;
    bool ok = true;
    for (std::size_t a = 0; a < i && ok; ++a)
      ok = std::abs(x.distance(a, i) - y.distance(image[a], p)) <= tol;
    if (!ok) continue;
    used[p] = true;
    image.push_back(p);
    if (extend_isomorphism(x, y, image, used, tol)) return true;
    image.pop_back();
    used[p] = false;
  }
  return false;
}

}  // namespace

bool are_isomorphic(const FiniteMMSpace& x, const FiniteMMSpace& y,
                    double tol) {
  if (x.size() != y.size()) return false;
  std::vector<std::size_t> image;
  std::vector<bool> used(y.size(), false);
  return extend_isomorphism(x, y, image, used, tol);
}

}  // namespace mmspace
