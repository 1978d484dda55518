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

#include "mmspace/quadratic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>

namespace mmspace {

double quadratic_value(const Matrix& q, const Coupling& pi) {
  const auto x = pi.pi.data();
  double total = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] == 0.0) continue;
    double row = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b) row += q(a, b) * x[b];
    total += x[a] * row;
  }
  return total;
}

std::optional<QuadraticResult> minimize_quadratic_exact(
    const Matrix& q, std::span<const double> mu, std::span<const double> nu,
    std::size_t max_cells) {
  const std::size_t n = mu.size(), m = nu.size(), cells = n * m;
  if (cells > max_cells || cells >= 63) return std::nullopt;

  Eigen::VectorXd rhs(n + m);
  for (std::size_t i = 0; i < n; ++i) rhs(i) = mu[i];
  for (std::size_t j = 0; j < m; ++j) rhs(n + j) = nu[j];

  std::uint64_t row_mask[64] = {}, col_mask[64] = {};
  for (std::size_t c = 0; c < cells; ++c) {
    row_mask[c / m] |= std::uint64_t{1} << c;
    col_mask[c % m] |= std::uint64_t{1} << c;
  }

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  std::uint64_t best_support = 0;
  std::vector<std::size_t> support;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << cells); ++s) {
    bool covers = true;
    for (std::size_t i = 0; i < n && covers; ++i) covers = (s & row_mask[i]) != 0;
    for (std::size_t j = 0; j < m && covers; ++j) covers = (s & col_mask[j]) != 0;
    if (!covers) continue;

    support.clear();
    for (std::size_t c = 0; c < cells; ++c)
      if (s >> c & 1) support.push_back(c);
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + m), k);
    Eigen::MatrixXd qs(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const std::size_t c = support[static_cast<std::size_t>(a)];
      e(static_cast<Eigen::Index>(c / m), a) = 1.0;
      e(static_cast<Eigen::Index>(n + c % m), a) = 1.0;
      for (Eigen::Index b = 0; b < k; ++b)
        qs(a, b) = q(c, support[static_cast<std::size_t>(b)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
    Eigen::VectorXd x = lu.solve(rhs);
    if ((e * x - rhs).norm() > 1e-9) continue;
    if (lu.rank() < k) {
      // Stationary point of the restriction to the face's affine hull. A
      // singular reduced Hessian means the stationary set is a flat on
      // which the objective is constant; its minimum is then also attained
      // on a smaller face, so the pattern can be skipped.
      const Eigen::MatrixXd basis = lu.kernel();
      const Eigen::MatrixXd h = basis.transpose() * qs * basis;
      const Eigen::VectorXd g = basis.transpose() * qs * x;
      Eigen::FullPivLU<Eigen::MatrixXd> hlu(h);
      if (!hlu.isInvertible()) continue;
      x += basis * hlu.solve(-g);
    }
    if (x.minCoeff() < -1e-11) continue;
    x = x.cwiseMax(0.0);
    const double value = x.dot(qs * x);
    if (value < best) {
      best = value;
      best_x = x;
      best_support = s;
    }
  }
  if (best_support == 0) return std::nullopt;

  Matrix pi(n, m);
  std::size_t a = 0;
  for (std::size_t c = 0; c < cells; ++c)
    if (best_support >> c & 1) pi(c / m, c % m) = best_x(static_cast<Eigen::Index>(a++));
  QuadraticResult out{{std::move(pi)}, 0.0};
  out.value = quadratic_value(q, out.coupling);
  return out;
}

QuadraticResult frank_wolfe(const Matrix& q, std::span<const double> mu,
                            std::span<const double> nu, const Coupling& start,
                            std::size_t iterations, StepRule rule) {
  const std::size_t n = mu.size(), m = nu.size(), cells = n * m;
  std::vector<double> x(start.pi.data().begin(), start.pi.data().end());
  std::vector<double> qx(cells), d(cells), qd(cells);
  auto multiply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t a = 0; a < cells; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < cells; ++b) s += q(a, b) * v[b];
      out[a] = s;
    }
  };
  auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a) s += u[a] * v[a];
    return s;
  };

  multiply(x, qx);
  double value = dot(x, qx);
  QuadraticResult best{start, value};
  Matrix grad(n, m);
  for (std::size_t t = 0; t < iterations; ++t) {
    for (std::size_t c = 0; c < cells; ++c) grad(c / m, c % m) = 2.0 * qx[c];
    const TransportResult vertex = transport_lp(grad, mu, nu);
    const auto s = vertex.coupling.pi.data();
    for (std::size_t c = 0; c < cells; ++c) d[c] = s[c] - x[c];
    multiply(d, qd);
    const double slope = dot(x, qd);  // half the directional derivative
    const double curv = dot(d, qd);
    if (slope >= -1e-15 && rule == StepRule::kLineSearch) break;
    double gamma;
    if (rule == StepRule::kOpenLoop) {
      gamma = 2.0 / (static_cast<double>(t) + 2.0);
    } else if (curv > 0.0) {
      gamma = std::clamp(-slope / curv, 0.0, 1.0);
    } else {
      gamma = 1.0;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      x[c] += gamma * d[c];
      qx[c] += gamma * qd[c];
    }
    value += 2.0 * gamma * slope + gamma * gamma * curv;
    if (value < best.value) {
      Matrix pi(n, m);
      for (std::size_t c = 0; c < cells; ++c) pi(c / m, c % m) = std::max(0.0, x[c]);
      best.coupling.pi = std::move(pi);
      best.value = quadratic_value(q, best.coupling);
    }
  }
  return best;
}

}  // namespace mmspace
