#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swsds/errors.hpp"

namespace swsds {

template <typename Scalar>
struct TransportSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> flow;
  Scalar objective = 0;
  std::size_t pivots = 0;
};

namespace detail {

// Spanning-tree basis of the bipartite transport graph. Nodes 0..m-1 are
// supply rows, m..m+n-1 are demand columns; every basic cell is a tree edge.
template <typename Scalar>
class TransportBasis {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TransportBasis(Eigen::Index m, Eigen::Index n) : m_(m), n_(n), basic_(m, n) { basic_.setZero(); }

  void add(Eigen::Index i, Eigen::Index j) {
    cells_.emplace_back(i, j);
    basic_(i, j) = 1;
  }

  void replace(std::pair<Eigen::Index, Eigen::Index> leaving, std::pair<Eigen::Index, Eigen::Index> entering) {
    auto it = std::find(cells_.begin(), cells_.end(), leaving);
    *it = entering;
    basic_(leaving.first, leaving.second) = 0;
    basic_(entering.first, entering.second) = 1;
  }

  bool is_basic(Eigen::Index i, Eigen::Index j) const { return basic_(i, j) != 0; }

  void rebuild_adjacency() {
    adjacency_.assign(m_ + n_, {});
    for (const auto& [i, j] : cells_) {
      adjacency_[i].push_back(m_ + j);
      adjacency_[m_ + j].push_back(i);
    }
  }

  // Dual potentials with u_0 = 0 and u_i + v_j = c_ij on every basic cell.
  void potentials(const Matrix& cost, std::vector<Scalar>& u, std::vector<Scalar>& v) const {
    u.assign(m_, Scalar(0));
    v.assign(n_, Scalar(0));
    std::vector<char> seen(m_ + n_, 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      auto node = stack.back();
      stack.pop_back();
      for (auto next : adjacency_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        if (node < m_) {
          v[next - m_] = cost(node, next - m_) - u[node];
        } else {
          u[next] = cost(next, node - m_) - v[node - m_];
        }
        stack.push_back(next);
      }
    }
  }

  // Tree path from row node `row` to column node m+col, as a node sequence
  // starting at the column and ending at the row.
  std::vector<Eigen::Index> path(Eigen::Index row, Eigen::Index col) const {
    std::vector<Eigen::Index> parent(m_ + n_, -1);
    std::vector<Eigen::Index> stack{row};
    parent[row] = row;
    const Eigen::Index target = m_ + col;
    while (!stack.empty() && parent[target] < 0) {
      auto node = stack.back();
      stack.pop_back();
      for (auto next : adjacency_[node]) {
        if (parent[next] >= 0) continue;
        parent[next] = node;
        stack.push_back(next);
      }
    }
    if (parent[target] < 0) throw Error("transport basis is not a spanning tree");
    std::vector<Eigen::Index> nodes{target};
    while (nodes.back() != row) nodes.push_back(parent[nodes.back()]);
    return nodes;
  }

  std::pair<Eigen::Index, Eigen::Index> cell(Eigen::Index a, Eigen::Index b) const {
    return a < m_ ? std::pair{a, b - m_} : std::pair{b, a - m_};
  }

 private:
  Eigen::Index m_, n_;
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> basic_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells_;
  std::vector<std::vector<Eigen::Index>> adjacency_;
};

}  // namespace detail

// Exact solution of the balanced transportation problem
//   min <flow, cost>  s.t.  flow 1 = supply, flow^T 1 = demand, flow >= 0
// by the primal transportation simplex. Starts from the north-west corner
// basis and switches to Bland's rule after a run of degenerate pivots.
template <typename DerivedS, typename DerivedD, typename DerivedC>
TransportSolution<typename DerivedC::Scalar> solve_transport(const Eigen::MatrixBase<DerivedS>& supply,
                                                             const Eigen::MatrixBase<DerivedD>& demand,
                                                             const Eigen::MatrixBase<DerivedC>& cost) {
  using Scalar = typename DerivedC::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Index = Eigen::Index;

  const Index m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw InvalidArgument("transport problem needs non-empty marginals");
  if (cost.rows() != m || cost.cols() != n) throw DimensionMismatchError("cost matrix shape does not match marginals");
  if (!cost.allFinite()) throw InvalidArgument("cost matrix has non-finite entries");
  if ((supply.array() < 0).any() || (demand.array() < 0).any() || !supply.allFinite() || !demand.allFinite())
    throw InvalidArgument("marginals must be finite and non-negative");
  const Scalar total_s = supply.sum(), total_d = demand.sum();
  const Scalar scale = std::max({Scalar(1), std::abs(total_s), std::abs(total_d)});
  if (std::abs(total_s - total_d) > Scalar(1e3) * std::numeric_limits<Scalar>::epsilon() * scale)
    throw InvalidArgument("supply and demand totals differ");

  const Matrix c = cost;
  TransportSolution<Scalar> sol;
  sol.flow = Matrix::Zero(m, n);
  detail::TransportBasis<Scalar> basis(m, n);

  // North-west corner: m+n-1 cells forming a staircase spanning tree.
  {
    std::vector<Scalar> s(m), d(n);
    for (Index i = 0; i < m; ++i) s[i] = supply(i);
    for (Index j = 0; j < n; ++j) d[j] = demand(j);
    Index i = 0, j = 0;
    while (true) {
      const Scalar x = std::min(s[i], d[j]);
      sol.flow(i, j) = x;
      s[i] -= x;
      d[j] -= x;
      basis.add(i, j);
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const Scalar cost_scale = std::max(Scalar(1), c.cwiseAbs().maxCoeff());
  const Scalar tolerance = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * cost_scale;
  const std::size_t max_pivots = 100 * static_cast<std::size_t>(m + n) * static_cast<std::size_t>(std::max(m, n)) + 1000;
  const std::size_t degenerate_limit = 2 * static_cast<std::size_t>(m + n);

  std::vector<Scalar> u, v;
  std::size_t degenerate_run = 0;
  bool bland = false;
  while (true) {
    basis.rebuild_adjacency();
    basis.potentials(c, u, v);

    Index enter_i = -1, enter_j = -1;
    Scalar best = -tolerance;
    for (Index i = 0; i < m && !(bland && enter_i >= 0); ++i) {
      for (Index j = 0; j < n; ++j) {
        if (basis.is_basic(i, j)) continue;
        const Scalar reduced = c(i, j) - u[i] - v[j];
        if (reduced < best) {
          best = bland ? -tolerance : reduced;
          enter_i = i;
          enter_j = j;
          if (bland) break;
        }
      }
    }
    if (enter_i < 0) break;
    if (++sol.pivots > max_pivots) throw Error("transport simplex exceeded its pivot limit");

    // Cycle: entering cell (+), then alternating (-), (+), ... along the tree path.
    const auto nodes = basis.path(enter_i, enter_j);
    Scalar theta = std::numeric_limits<Scalar>::infinity();
    std::pair<Index, Index> leaving{-1, -1};
    for (std::size_t k = 0; k + 1 < nodes.size(); k += 2) {
      const auto cell = basis.cell(nodes[k], nodes[k + 1]);
      const Scalar f = sol.flow(cell.first, cell.second);
      const bool smaller_index =
          leaving.first < 0 || cell.first * n + cell.second < leaving.first * n + leaving.second;
      if (f < theta || (f == theta && smaller_index)) {
        theta = f;
        leaving = cell;
      }
    }
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const auto cell = basis.cell(nodes[k], nodes[k + 1]);
      if (k % 2 == 0) {
        sol.flow(cell.first, cell.second) -= theta;
      } else {
        sol.flow(cell.first, cell.second) += theta;
      }
    }
    sol.flow(leaving.first, leaving.second) = 0;
    sol.flow(enter_i, enter_j) = theta;
    basis.replace(leaving, {enter_i, enter_j});

    if (theta > 0) {
      degenerate_run = 0;
    } else if (++degenerate_run > degenerate_limit) {
      bland = true;
    }
  }

  sol.objective = (sol.flow.array() * c.array()).sum();
  return sol;
}

}  // namespace swsds
