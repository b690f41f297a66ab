#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace onn {

using Index = std::size_t;

struct Edge {
  Index u;
  Index v;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Index node;
  double w;
};

// Undirected, non-negatively weighted simple graph. Edges are stored once
// with u < v in lexicographic order; zero-weight edges are dropped at
// construction. Immutable after construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  Index node_count() const noexcept { return n_; }
  Index edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  double degree(Index i) const { return degree_[i]; }
  std::span<const double> degrees() const noexcept { return degree_; }

  // Neighbors of i sorted by node index.
  std::span<const Neighbor> neighbors(Index i) const {
    return {adjacency_.data() + offset_[i], adjacency_.data() + offset_[i + 1]};
  }
  Index neighbor_count(Index i) const { return offset_[i + 1] - offset_[i]; }

  bool has_edge(Index u, Index v) const;
  // 0 when the edge is absent.
  double weight(Index u, Index v) const;
  double total_weight() const;

  // Recomputes degrees from the edge list in edge order; used to validate
  // the cache.
  std::vector<double> recompute_degrees() const;

  friend WeightedGraph build_graph(Index n, std::span<const Edge> edge_list);

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> degree_;
  std::vector<Index> offset_{0};
  std::vector<Neighbor> adjacency_;
};

// Validates and canonicalizes an edge list. Errors: IndexOutOfRange,
// SelfLoop, DuplicateEdge, NegativeWeight.
WeightedGraph build_graph(Index n, std::span<const Edge> edge_list);
inline WeightedGraph build_graph(Index n, std::initializer_list<Edge> edge_list) {
  return build_graph(n, std::span<const Edge>(edge_list.begin(), edge_list.size()));
}

Eigen::MatrixXd adjacency_matrix(const WeightedGraph& g);
// L = D - A.
Eigen::MatrixXd laplacian(const WeightedGraph& g);
// D^{-1/2} L D^{-1/2}; throws IsolatedNode when some degree is 0.
Eigen::MatrixXd normalized_laplacian(const WeightedGraph& g);

// Component label per node (label = smallest node index in the component).
std::vector<Index> component_labels(const WeightedGraph& g);
Index component_count(const WeightedGraph& g);
bool is_connected(const WeightedGraph& g);

// Hop diameter via BFS from every node; throws Disconnected.
Index hop_diameter(const WeightedGraph& g);

// Edge-list text format:
//   onn-graph v1 <n>
//   u v w
// Errors: FileFormat with the offending line number.
WeightedGraph read_graph(std::istream& in);
WeightedGraph load_graph(const std::string& path);
void write_graph(std::ostream& out, const WeightedGraph& g);
void save_graph(const std::string& path, const WeightedGraph& g);

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace onn
