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

#include "mmspace/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "mmspace/error.hpp"

namespace mmspace {

bool Coupling::is_coupling_of(std::span<const double> mu,
                              std::span<const double> nu, double tol) const {
  if (pi.rows() != mu.size() || pi.cols() != nu.size()) return false;
  for (double v : pi.data())
    if (v < -tol) return false;
  const auto rs = pi.row_sums();
  const auto cs = pi.col_sums();
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::abs(rs[i] - mu[i]) > tol) return false;
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (std::abs(cs[j] - nu[j]) > tol) return false;
  return true;
}

Coupling Coupling::product(std::span<const double> mu,
                           std::span<const double> nu) {
  Matrix pi(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) pi(i, j) = mu[i] * nu[j];
  return {std::move(pi)};
}

Coupling Coupling::identity(std::span<const double> mu) {
  Matrix pi(mu.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) pi(i, i) = mu[i];
  return {std::move(pi)};
}

namespace {

// Transportation simplex on a spanning-tree basis of the bipartite graph
// rows + cols. Supplies and demands are strictly positive and balanced.
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, std::vector<double> supply,
                   std::vector<double> demand)
      : n_(supply.size()),
        m_(demand.size()),
        cost_(cost),
        flow_(n_, m_),
        basic_(n_ * m_, false) {
    northwest_corner(std::move(supply), std::move(demand));
    double scale = 0.0;
    for (double c : cost_.data()) scale = std::max(scale, std::abs(c));
    tol_ = 1e-12 * (1.0 + scale);
  }

  Matrix solve() {
    const std::size_t max_iter = 200 * (n_ + m_) * (n_ + m_) + 1000;
    std::size_t degenerate_run = 0;
    bool bland = false;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      compute_potentials();
      const auto entering = pick_entering(bland);
      if (!entering) return flow_;
      const double theta = pivot(entering->first, entering->second, bland);
      degenerate_run = theta == 0.0 ? degenerate_run + 1 : 0;
      if (degenerate_run > 8 * (n_ + m_)) bland = true;
    }
    throw std::logic_error("transport simplex did not terminate");
  }

 private:
  using Cell = std::pair<std::size_t, std::size_t>;

  void northwest_corner(std::vector<double> a, std::vector<double> b) {
    std::size_t i = 0, j = 0;
    while (true) {
      const double x = std::min(a[i], b[j]);
      add_basic(i, j, x);
      a[i] -= x;
      b[j] -= x;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (i == n_ - 1) {
        ++j;
      } else if (j == m_ - 1) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void add_basic(std::size_t i, std::size_t j, double x) {
    flow_(i, j) = std::max(0.0, x);
    basic_[i * m_ + j] = true;
    basis_.emplace_back(i, j);
  }

  void build_adjacency() {
    adj_.assign(n_ + m_, {});
    for (std::size_t e = 0; e < basis_.size(); ++e) {
      const auto [i, j] = basis_[e];
      adj_[i].push_back(n_ + j);
      adj_[n_ + j].push_back(i);
    }
  }

  void compute_potentials() {
    build_adjacency();
    potential_.assign(n_ + m_, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> stack{0};
    potential_[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj_[u]) {
        if (!std::isnan(potential_[v])) continue;
        // c_ij = u_i + v_j on basic cells.
        const std::size_t i = u < n_ ? u : v;
        const std::size_t j = (u < n_ ? v : u) - n_;
        potential_[v] = cost_(i, j) - potential_[u];
        stack.push_back(v);
      }
    }
  }

  std::optional<Cell> pick_entering(bool bland) const {
    std::optional<Cell> best;
    double best_rc = -tol_;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        if (basic_[i * m_ + j]) continue;
        const double rc = cost_(i, j) - potential_[i] - potential_[n_ + j];
        if (rc < best_rc) {
          best = Cell{i, j};
          if (bland) return best;
          best_rc = rc;
        }
      }
    }
    return best;
  }

  // Enters (i, j), returns the step length.
  double pivot(std::size_t i, std::size_t j, bool bland) {
    // Tree path from row node i to column node n_ + j.
    std::vector<std::size_t> parent(n_ + m_, n_ + m_);
    std::vector<std::size_t> queue{i};
    parent[i] = i;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t u = queue[q];
      if (u == n_ + j) break;
      for (std::size_t v : adj_[u]) {
        if (parent[v] != n_ + m_) continue;
        parent[v] = u;
        queue.push_back(v);
      }
    }
    std::vector<std::size_t> nodes;
    for (std::size_t v = n_ + j; v != i; v = parent[v]) nodes.push_back(v);
    nodes.push_back(i);
    std::reverse(nodes.begin(), nodes.end());
    // Edge t joins nodes[t-1] and nodes[t]; odd t lose flow, even t gain.
    auto cell_of = [&](std::size_t a, std::size_t b) {
      return a < n_ ? Cell{a, b - n_} : Cell{b, a - n_};
    };
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave_t = 0;
    for (std::size_t t = 1; t < nodes.size(); t += 2) {
      const auto [r, c] = cell_of(nodes[t - 1], nodes[t]);
      const double x = flow_(r, c);
      const bool better =
          x < theta ||
          (bland && x == theta &&
           r * m_ + c < cell_index(cell_of(nodes[leave_t - 1], nodes[leave_t])));
      if (better) {
        theta = x;
        leave_t = t;
      }
    }
    for (std::size_t t = 1; t < nodes.size(); ++t) {
      const auto [r, c] = cell_of(nodes[t - 1], nodes[t]);
      if (t % 2 == 1) {
        flow_(r, c) -= theta;
      } else {
        flow_(r, c) += theta;
      }
    }
    const Cell leaving = cell_of(nodes[leave_t - 1], nodes[leave_t]);
    flow_(leaving.first, leaving.second) = 0.0;
    basic_[cell_index(leaving)] = false;
    std::replace(basis_.begin(), basis_.end(), leaving, Cell{i, j});
    basic_[i * m_ + j] = true;
    flow_(i, j) = theta;
    return theta;
  }

  std::size_t cell_index(Cell c) const { return c.first * m_ + c.second; }

  std::size_t n_, m_;
  const Matrix& cost_;
  Matrix flow_;
  std::vector<bool> basic_;
  std::vector<Cell> basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> potential_;
  double tol_ = 0.0;
};

}  // namespace

TransportResult transport_lp(const Matrix& cost, std::span<const double> mu,
                             std::span<const double> nu) {
  if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "DimensionMismatch: cost matrix does not match marginals");
  }
  std::vector<std::size_t> rows, cols;
  double sum_mu = 0.0, sum_nu = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) {
      rows.push_back(i);
      sum_mu += mu[i];
    }
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (nu[j] > 0.0) {
      cols.push_back(j);
      sum_nu += nu[j];
    }
  if (rows.empty() || cols.empty() ||
      std::abs(sum_mu - sum_nu) > 1e-9 * std::max(1.0, sum_mu)) {
    std::ostringstream os;
    os.precision(17);
    os << "MarginalMismatch: transport marginals have masses " << sum_mu
       << " and " << sum_nu;
    throw Error(ErrorKind::kMarginalMismatch, os.str());
  }
  Matrix sub(rows.size(), cols.size());
  std::vector<double> a(rows.size()), b(cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a[r] = mu[rows[r]];
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = cost(rows[r], cols[c]);
  }
  const double scale = sum_mu / sum_nu;
  for (std::size_t c = 0; c < cols.size(); ++c) b[c] = nu[cols[c]] * scale;

  TransportSimplex simplex(sub, std::move(a), std::move(b));
  const Matrix flow = simplex.solve();

  TransportResult out{{Matrix(mu.size(), nu.size())}, 0.0};
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out.coupling.pi(rows[r], cols[c]) = flow(r, c);
      out.value += flow(r, c) * sub(r, c);
    }
  return out;
}

Coupling compose_couplings(const Coupling& pi12, const Coupling& pi23) {
  if (pi12.cols() != pi23.rows()) {
    throw Error(ErrorKind::kMarginalMismatch,
                "MarginalMismatch: middle dimensions differ");
  }
  const auto mid_a = pi12.pi.col_sums();
  const auto mid_b = pi23.pi.row_sums();
  for (std::size_t j = 0; j < mid_a.size(); ++j) {
    if (std::abs(mid_a[j] - mid_b[j]) > kMarginalTolerance) {
      std::ostringstream os;
      os << "MarginalMismatch: middle marginal differs at index " << j << " ("
         << mid_a[j] << " vs " << mid_b[j] << ")";
      throw Error(ErrorKind::kMarginalMismatch, os.str());
    }
  }
  Matrix out(pi12.rows(), pi23.cols());
  for (std::size_t j = 0; j < mid_a.size(); ++j) {
    if (mid_a[j] <= 0.0) continue;
    for (std::size_t i = 0; i < pi12.rows(); ++i) {
      const double w = pi12(i, j) / mid_a[j];
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < pi23.cols(); ++k) out(i, k) += w * pi23(j, k);
    }
  }
  return {std::move(out)};
}

}  // namespace mmspace
