#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onn/graph.hpp"
#include "onn/loss.hpp"

namespace onn {

enum class GraphKind { Path, Cycle, KRegular, Community, RandomGeometric, Star, Complete };

struct WeightLaw {
  enum class Kind { Unit, Uniform };
  Kind kind = Kind::Unit;
  double a = 1.0;
  double b = 1.0;
};

struct GenSpec {
  GraphKind kind = GraphKind::Path;
  Index n = 0;
  Index k = 2;  // degree (KRegular), intra-community degree (Community), mean degree (RandomGeometric)
  Index communities = 1;
  std::uint64_t seed = 0;
  WeightLaw weights{};
};

std::string to_string(GraphKind kind);
// Errors: InvalidParams for an unknown name.
GraphKind parse_graph_kind(const std::string& name);

inline constexpr int kGeneratorRetryCap = 10000;

// Connected graph of the requested family. Community graphs split the nodes
// into contiguous blocks (sizes differ by at most one), give each block a
// ring (k = 2), a circulant k-lattice, or a clique (k >= size - 1), and join
// the blocks with a random recursive tree of inter-community edges.
// Errors: InfeasibleSpec, RetryExhausted.
WeightedGraph generate(const GenSpec& spec);

// Community index per node for the contiguous block split.
std::vector<Index> community_labels(Index n, Index communities);

enum class InitLaw { Gaussian, ClusterCentroids };

// Gaussian: i.i.d. N(0, 1) entries. ClusterCentroids: every row of a
// community equals that community's N(0, I) centroid. Errors:
// InvalidDimension when n or d is 0.
SemanticState init_state(Index n, Index d, InitLaw law, std::uint64_t seed, Index communities = 1);

}  // namespace onn
