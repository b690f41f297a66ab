#include "onn/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace onn {

namespace {
int g_threads = 1;

// Keeps the `pool` smallest candidates seen so far; `heap` is a max-heap.
void offer(std::vector<PairCandidate>& heap, std::size_t pool, const PairCandidate& c) {
  if (heap.size() < pool) {
    heap.push_back(c);
    std::push_heap(heap.begin(), heap.end());
  } else if (c < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = c;
    std::push_heap(heap.begin(), heap.end());
  }
}

double row_dist2(const StateMatrix& x, Index u, Index v) {
  return (x.row(static_cast<Eigen::Index>(u)) - x.row(static_cast<Eigen::Index>(v))).squaredNorm();
}

// Scan rows [begin, end) against all larger indices.
void scan_rows(const WeightedGraph& g, const StateMatrix& x, std::span<const Index> label,
               std::size_t pool, Index begin, Index end, std::vector<PairCandidate>& heap) {
  const Index n = g.node_count();
  for (Index u = begin; u < end; ++u) {
    auto nb = g.neighbors(u);
    auto it = nb.begin();
    for (Index v = u + 1; v < n; ++v) {
      while (it != nb.end() && it->node < v) ++it;
      if (it != nb.end() && it->node == v) continue;
      if (label[u] != label[v]) continue;
      offer(heap, pool, {row_dist2(x, u, v), u, v});
    }
  }
}

std::vector<double> inverse_sqrt_degrees(const WeightedGraph& g) {
  std::vector<double> r(g.node_count(), 0.0);
  for (Index i = 0; i < g.node_count(); ++i) r[i] = 1.0 / std::sqrt(g.degree(i));
  return r;
}

std::vector<double> neighbor_sums(const WeightedGraph& g, std::span<const double> r) {
  std::vector<double> s(g.node_count(), 0.0);
  for (Index i = 0; i < g.node_count(); ++i) {
    double acc = 0.0;
    for (const Neighbor& nb : g.neighbors(i)) acc += nb.w * r[nb.node];
    s[i] = acc;
  }
  return s;
}

// kappa(i,j) = w (r_i + r_j) - (s_i - w r_j) - (s_j - w r_i)
//            = 2 w (r_i + r_j) - (s_i + s_j),
// written with commutative pairings so kappa(i,j) == kappa(j,i) bitwise.
inline double forman_edge(const Edge& e, std::span<const double> r, std::span<const double> s) {
  return 2.0 * e.w * (r[e.u] + r[e.v]) - (s[e.u] + s[e.v]);
}

}  // namespace

void set_threads(int threads) { g_threads = std::max(1, threads); }
int threads() { return g_threads; }

namespace kernels {

namespace serial {

void laplacian_apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out) {
  out.resize(x.rows(), x.cols());
  for (Index i = 0; i < g.node_count(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.row(ii) = g.degree(i) * x.row(ii);
    for (const Neighbor& nb : g.neighbors(i)) out.row(ii) -= nb.w * x.row(static_cast<Eigen::Index>(nb.node));
  }
}

double edge_energy(const WeightedGraph& g, const StateMatrix& x) {
  double acc = 0.0;
  for (const Edge& e : g.edges()) acc += e.w * row_dist2(x, e.u, e.v);
  return 0.5 * acc;
}

std::vector<double> forman(const WeightedGraph& g) {
  const auto r = inverse_sqrt_degrees(g);
  const auto s = neighbor_sums(g, r);
  std::vector<double> kappa(g.edge_count());
  auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) kappa[k] = forman_edge(edges[k], r, s);
  return kappa;
}

std::vector<PairCandidate> nearest_pairs(const WeightedGraph& g, const StateMatrix& x,
                                         std::span<const Index> label, std::size_t pool) {
  std::vector<PairCandidate> heap;
  if (pool == 0) return heap;
  scan_rows(g, x, label, pool, 0, g.node_count(), heap);
  std::sort(heap.begin(), heap.end());
  return heap;
}

}  // namespace serial

namespace omp {

void laplacian_apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out) {
  out.resize(x.rows(), x.cols());
  const auto n = static_cast<std::ptrdiff_t>(g.node_count());
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.row(ii) = g.degree(static_cast<Index>(i)) * x.row(ii);
    for (const Neighbor& nb : g.neighbors(static_cast<Index>(i))) {
      out.row(ii) -= nb.w * x.row(static_cast<Eigen::Index>(nb.node));
    }
  }
}

double edge_energy(const WeightedGraph& g, const StateMatrix& x) {
  auto edges = g.edges();
  const auto m = static_cast<std::ptrdiff_t>(edges.size());
  std::vector<double> term(edges.size());
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (std::ptrdiff_t k = 0; k < m; ++k) term[k] = edges[k].w * row_dist2(x, edges[k].u, edges[k].v);
  double acc = 0.0;
  for (double t : term) acc += t;
  return 0.5 * acc;
}

std::vector<double> forman(const WeightedGraph& g) {
  const auto r = inverse_sqrt_degrees(g);
  const auto s = neighbor_sums(g, r);
  auto edges = g.edges();
  std::vector<double> kappa(edges.size());
  const auto m = static_cast<std::ptrdiff_t>(edges.size());
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (std::ptrdiff_t k = 0; k < m; ++k) kappa[k] = forman_edge(edges[k], r, s);
  return kappa;
}

std::vector<PairCandidate> nearest_pairs(const WeightedGraph& g, const StateMatrix& x,
                                         std::span<const Index> label, std::size_t pool) {
  std::vector<PairCandidate> merged;
  if (pool == 0) return merged;
  const Index n = g.node_count();
  // Per-thread heaps over row blocks. The candidate order is total, so the
  // `pool` smallest candidates are the same for every partition.
  const Index blocks = std::max<Index>(1, std::min<Index>(n, static_cast<Index>(g_threads) * 8));
  std::vector<std::vector<PairCandidate>> local(blocks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(g_threads)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    // Row u scans n - u - 1 partners; split on the triangle area for balance.
    auto edge_of = [&](std::ptrdiff_t k) {
      const double f = 1.0 - std::sqrt(1.0 - double(k) / double(blocks));
      return static_cast<Index>(std::lround(f * double(n)));
    };
    scan_rows(g, x, label, pool, edge_of(b), b + 1 == static_cast<std::ptrdiff_t>(blocks) ? n : edge_of(b + 1),
              local[b]);
  }
  for (auto& h : local) {
    for (const auto& c : h) offer(merged, pool, c);
  }
  std::sort(merged.begin(), merged.end());
  return merged;
}

}  // namespace omp

void laplacian_apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out) {
  if (g_threads > 1) return omp::laplacian_apply(g, x, out);
  serial::laplacian_apply(g, x, out);
}

double edge_energy(const WeightedGraph& g, const StateMatrix& x) {
  return g_threads > 1 ? omp::edge_energy(g, x) : serial::edge_energy(g, x);
}

std::vector<double> forman(const WeightedGraph& g) {
  return g_threads > 1 ? omp::forman(g) : serial::forman(g);
}

std::vector<PairCandidate> nearest_pairs(const WeightedGraph& g, const StateMatrix& x,
                                         std::span<const Index> label, std::size_t pool) {
  return g_threads > 1 ? omp::nearest_pairs(g, x, label, pool) : serial::nearest_pairs(g, x, label, pool);
}

}  // namespace kernels
}  // namespace onn
