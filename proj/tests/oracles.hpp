#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "onn/graph.hpp"
#include "onn/homology.hpp"
#include "onn/rng.hpp"

namespace oracle {

using onn::Edge;
using onn::Index;
using onn::WeightedGraph;

// Weighted adjacency straight from the edge list.
inline Eigen::MatrixXd adjacency(Index n, const std::vector<Edge>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const Edge& e : edges) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = e.w;
    a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = e.w;
  }
  return a;
}

inline Eigen::MatrixXd laplacian(Index n, const std::vector<Edge>& edges) {
  const Eigen::MatrixXd a = adjacency(n, edges);
  Eigen::MatrixXd l = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
  return l;
}

inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

// Forman curvature by the textbook expression with explicit exclusions.
inline double forman(const Eigen::MatrixXd& a, Index i, Index j) {
  const auto n = a.rows();
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  auto deg = [&](Eigen::Index x) { return a.row(x).sum(); };
  const double w = a(ii, jj);
  double k = w * (1.0 / std::sqrt(deg(ii)) + 1.0 / std::sqrt(deg(jj)));
  for (Eigen::Index x = 0; x < n; ++x) {
    if (x != jj && a(ii, x) > 0) k -= a(ii, x) / std::sqrt(deg(x));
    if (x != ii && a(jj, x) > 0) k -= a(jj, x) / std::sqrt(deg(x));
  }
  return k;
}

inline Index bfs_diameter(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Index best = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    std::vector<Index> dist(static_cast<std::size_t>(n), std::numeric_limits<Index>::max());
    std::queue<Eigen::Index> q;
    dist[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto x = q.front();
      q.pop();
      for (Eigen::Index y = 0; y < n; ++y) {
        if (a(x, y) > 0 && dist[static_cast<std::size_t>(y)] == std::numeric_limits<Index>::max()) {
          dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
          q.push(y);
        }
      }
    }
    for (Index d : dist) best = std::max(best, d);
  }
  return best;
}

// Components by repeated DFS on the dense adjacency.
inline Index components(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  Index count = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    ++count;
    std::vector<Eigen::Index> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (Eigen::Index y = 0; y < n; ++y) {
        if (a(x, y) > 0 && !seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          stack.push_back(y);
        }
      }
    }
  }
  return count;
}

// Bottleneck distance between finite diagrams by exhaustive matching over
// the diagonal-augmented assignment (small inputs only).
inline double bottleneck(const std::vector<onn::PersistencePair>& a, const std::vector<onn::PersistencePair>& b) {
  const std::size_t m = a.size() + b.size();
  auto cost = [&](std::size_t i, std::size_t j) -> double {
    const bool ra = i < a.size(), rb = j < b.size();
    if (ra && rb) return std::max(std::abs(a[i].birth - b[j].birth), std::abs(a[i].death - b[j].death));
    if (ra) return (a[i].death - a[i].birth) / 2.0;  // a[i] to the diagonal
    if (rb) return (b[j].death - b[j].birth) / 2.0;  // diagonal to b[j]
    return 0.0;
  };
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, cost(i, perm[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Random connected weighted graph: random tree plus extra edges.
inline WeightedGraph random_connected(onn::CounterRng& rng, Index n, double extra_p, double wlo = 0.5, double whi = 2.0) {
  std::vector<Edge> edges;
  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  for (Index v = 1; v < n; ++v) {
    const Index u = rng.below(v);
    edges.push_back({u, v, rng.uniform(wlo, whi)});
    used[u][v] = 1;
  }
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (!used[u][v] && rng.bernoulli(extra_p)) edges.push_back({u, v, rng.uniform(wlo, whi)});
  return onn::build_graph(n, edges);
}

inline std::vector<Edge> edge_vector(const WeightedGraph& g) { return {g.edges().begin(), g.edges().end()}; }

}  // namespace oracle
