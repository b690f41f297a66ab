#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; the OpenMP
// versions write per-item results into buffers and reduce them serially in
// item order, so for any thread count they return the bit-identical result
// of the serial reference. The unqualified `kernels::` entry points dispatch
// on the process-wide thread setting (default 1 = serial).

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "onn/graph.hpp"

namespace onn {

using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Number of OpenMP threads used by the dispatching kernels.
void set_threads(int threads);
int threads();

struct PairCandidate {
  double dist2;
  Index u;
  Index v;

  friend bool operator<(const PairCandidate& a, const PairCandidate& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  }
  friend bool operator==(const PairCandidate&, const PairCandidate&) = default;
};

namespace kernels {

namespace serial {
// out = L x, row by row.
void laplacian_apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out);
// 1/2 sum_e w_e ||x_u - x_v||^2, summed in edge order.
double edge_energy(const WeightedGraph& g, const StateMatrix& x);
// Forman-Ricci curvature per edge, indexed like g.edges().
std::vector<double> forman(const WeightedGraph& g);
// The `pool` closest non-adjacent pairs u < v with label[u] == label[v],
// ordered by (dist2, u, v).
std::vector<PairCandidate> nearest_pairs(const WeightedGraph& g, const StateMatrix& x,
                                         std::span<const Index> label, std::size_t pool);
}  // namespace serial

namespace omp {
void laplacian_apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out);
double edge_energy(const WeightedGraph& g, const StateMatrix& x);
std::vector<double> forman(const WeightedGraph& g);
std::vector<PairCandidate> nearest_pairs(const WeightedGraph& g, const StateMatrix& x,
                                         std::span<const Index> label, std::size_t pool);
}  // namespace omp

void laplacian_apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out);
double edge_energy(const WeightedGraph& g, const StateMatrix& x);
std::vector<double> forman(const WeightedGraph& g);
std::vector<PairCandidate> nearest_pairs(const WeightedGraph& g, const StateMatrix& x,
                                         std::span<const Index> label, std::size_t pool);

}  // namespace kernels
}  // namespace onn
