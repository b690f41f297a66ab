#include "onn/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "onn/error.hpp"
#include "onn/rng.hpp"

namespace onn {

namespace {

[[noreturn]] void infeasible(const std::string& what) { throw Error(ErrorCode::InfeasibleSpec, what); }

void add_edge(std::vector<Edge>& edges, Index u, Index v) { edges.push_back(Edge{std::min(u, v), std::max(u, v), 1.0}); }

// Circulant lattice on nodes [first, first + m): ring for k = 2, clique for
// k >= m - 1.
void lattice(std::vector<Edge>& edges, Index first, Index m, Index k) {
  if (m < 2) return;
  if (k + 1 >= m) {
    for (Index a = 0; a < m; ++a)
      for (Index b = a + 1; b < m; ++b) add_edge(edges, first + a, first + b);
    return;
  }
  if (k % 2 == 1 && m % 2 == 1) infeasible("odd intra-community degree needs even community size");
  for (Index a = 0; a < m; ++a) {
    for (Index off = 1; off <= k / 2; ++off) add_edge(edges, first + a, first + (a + off) % m);
    if (k % 2 == 1 && a < m / 2) add_edge(edges, first + a, first + a + m / 2);
  }
}

std::vector<Edge> community_edges(const GenSpec& spec, CounterRng& rng) {
  const Index c = spec.communities;
  if (c < 1 || c > spec.n) infeasible("communities must lie in [1, n]");
  if (spec.k < 1) infeasible("community degree k must be >= 1");
  std::vector<Edge> edges;
  std::vector<Index> first(c + 1, 0);
  for (Index i = 0; i < c; ++i) first[i + 1] = first[i] + spec.n / c + (i < spec.n % c ? 1 : 0);
  for (Index i = 0; i < c; ++i) lattice(edges, first[i], first[i + 1] - first[i], spec.k);
  for (Index i = 1; i < c; ++i) {
    const Index parent = rng.below(i);
    const Index u = first[i] + rng.below(first[i + 1] - first[i]);
    const Index v = first[parent] + rng.below(first[parent + 1] - first[parent]);
    add_edge(edges, u, v);
  }
  return edges;
}

bool connected_edges(Index n, const std::vector<Edge>& edges) {
  return is_connected(build_graph(n, edges));
}

// Pairing model with pair-level rejection: unmatched points are paired
// uniformly, loops and repeated pairs are redrawn, and a dead end restarts.
std::vector<Edge> k_regular_edges(const GenSpec& spec, CounterRng& rng) {
  const Index n = spec.n, k = spec.k;
  if (k < 1 || k >= n) infeasible("k-regular needs 1 <= k < n");
  if ((n * k) % 2 != 0) infeasible("k-regular needs n * k even");
  if (k == 1 && n > 2) infeasible("1-regular graphs on more than two nodes are disconnected");
  for (int attempt = 0; attempt < kGeneratorRetryCap; ++attempt) {
    std::vector<Index> points;
    points.reserve(n * k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) points.push_back(i);
    std::vector<std::vector<Index>> adj(n);
    auto adjacent = [&](Index a, Index b) { return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end(); };
    std::vector<Edge> edges;
    bool dead_end = false;
    while (!points.empty()) {
      bool paired = false;
      const std::size_t tries = 50 * points.size();
      for (std::size_t t = 0; t < tries && !paired; ++t) {
        const auto i = static_cast<std::size_t>(rng.below(points.size()));
        const auto j = static_cast<std::size_t>(rng.below(points.size()));
        const Index a = points[i], b = points[j];
        if (i == j || a == b || adjacent(a, b)) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
        add_edge(edges, a, b);
        const std::size_t hi = std::max(i, j), lo = std::min(i, j);
        points[hi] = points.back();
        points.pop_back();
        points[lo] = points.back();
        points.pop_back();
        paired = true;
      }
      if (!paired) {
        dead_end = true;
        break;
      }
    }
    if (!dead_end && connected_edges(n, edges)) return edges;
  }
  throw Error(ErrorCode::RetryExhausted, "k-regular generation exceeded the retry cap");
}

std::vector<Edge> geometric_edges(const GenSpec& spec, CounterRng& rng) {
  const Index n = spec.n;
  if (n < 2) infeasible("random geometric graphs need n >= 2");
  std::vector<double> x(n), y(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform();
  }
  auto dist2 = [&](Index a, Index b) { return (x[a] - x[b]) * (x[a] - x[b]) + (y[a] - y[b]) * (y[a] - y[b]); };
  const double r = std::sqrt(static_cast<double>(spec.k) / (std::numbers::pi * static_cast<double>(n - 1)));
  std::vector<Edge> edges;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (dist2(a, b) <= r * r) add_edge(edges, a, b);
  // Prim's minimum spanning tree over the complete Euclidean graph.
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<Index> from(n, 0);
  std::vector<char> in_tree(n, 0);
  best[0] = 0.0;
  for (Index step = 0; step < n; ++step) {
    Index pick = n;
    for (Index i = 0; i < n; ++i)
      if (!in_tree[i] && (pick == n || best[i] < best[pick])) pick = i;
    in_tree[pick] = 1;
    if (step > 0 && dist2(pick, from[pick]) > r * r) add_edge(edges, pick, from[pick]);
    for (Index i = 0; i < n; ++i) {
      if (in_tree[i]) continue;
      const double d = dist2(pick, i);
      if (d < best[i]) {
        best[i] = d;
        from[i] = pick;
      }
    }
  }
  return edges;
}

}  // namespace

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Path:
      return "path";
    case GraphKind::Cycle:
      return "cycle";
    case GraphKind::KRegular:
      return "k_regular";
    case GraphKind::Community:
      return "community";
    case GraphKind::RandomGeometric:
      return "random_geometric";
    case GraphKind::Star:
      return "star";
    case GraphKind::Complete:
      return "complete";
  }
  return "unknown";
}

GraphKind parse_graph_kind(const std::string& name) {
  for (GraphKind k : {GraphKind::Path, GraphKind::Cycle, GraphKind::KRegular, GraphKind::Community,
                      GraphKind::RandomGeometric, GraphKind::Star, GraphKind::Complete}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidParams, "unknown graph kind '" + name + "'");
}

WeightedGraph generate(const GenSpec& spec) {
  if (spec.n == 0) infeasible("graphs need n >= 1");
  if (spec.weights.kind == WeightLaw::Kind::Uniform && !(spec.weights.a > 0.0 && spec.weights.b >= spec.weights.a)) {
    infeasible("uniform weights need 0 < a <= b");
  }
  CounterRng rng(spec.seed, streams::kGraph);
  std::vector<Edge> edges;
  const Index n = spec.n;
  switch (spec.kind) {
    case GraphKind::Path:
      for (Index i = 0; i + 1 < n; ++i) add_edge(edges, i, i + 1);
      break;
    case GraphKind::Cycle:
      if (n < 3) infeasible("cycles need n >= 3");
      for (Index i = 0; i < n; ++i) add_edge(edges, i, (i + 1) % n);
      break;
    case GraphKind::KRegular:
      edges = k_regular_edges(spec, rng);
      break;
    case GraphKind::Community:
      edges = community_edges(spec, rng);
      break;
    case GraphKind::RandomGeometric:
      edges = geometric_edges(spec, rng);
      break;
    case GraphKind::Star:
      for (Index i = 1; i < n; ++i) add_edge(edges, 0, i);
      break;
    case GraphKind::Complete:
      for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b) add_edge(edges, a, b);
      break;
  }
  if (spec.weights.kind == WeightLaw::Kind::Uniform) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    CounterRng wrng(spec.seed, streams::kWeights);
    for (Edge& e : edges) e.w = wrng.uniform(spec.weights.a, spec.weights.b);
  }
  WeightedGraph g = build_graph(n, edges);
  if (!is_connected(g)) infeasible("generated graph is disconnected");
  return g;
}

std::vector<Index> community_labels(Index n, Index communities) {
  if (communities < 1 || communities > n) throw Error(ErrorCode::InvalidParams, "communities must lie in [1, n]");
  std::vector<Index> labels(n);
  Index node = 0;
  for (Index c = 0; c < communities; ++c) {
    const Index size = n / communities + (c < n % communities ? 1 : 0);
    for (Index j = 0; j < size; ++j) labels[node++] = c;
  }
  return labels;
}

SemanticState init_state(Index n, Index d, InitLaw law, std::uint64_t seed, Index communities) {
  if (n == 0 || d == 0) throw Error(ErrorCode::InvalidDimension, "initial state needs n >= 1 and d >= 1");
  CounterRng rng(seed, streams::kState);
  StateMatrix s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (law == InitLaw::Gaussian) {
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = rng.normal();
    return SemanticState(std::move(s));
  }
  const std::vector<Index> labels = community_labels(n, communities);
  StateMatrix centroids(static_cast<Eigen::Index>(communities), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < centroids.rows(); ++i)
    for (Eigen::Index j = 0; j < centroids.cols(); ++j) centroids(i, j) = rng.normal();
  for (Index i = 0; i < n; ++i) s.row(static_cast<Eigen::Index>(i)) = centroids.row(static_cast<Eigen::Index>(labels[i]));
  return SemanticState(std::move(s));
}

}  // namespace onn
