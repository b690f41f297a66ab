#pragma once

#include <vector>

#include "onn/graph.hpp"
#include "onn/homology.hpp"

namespace onn {

struct AdmissibilityReport {
  bool non_negative = true;
  bool symmetric = true;  // holds by construction of WeightedGraph
  bool connected = true;
  bool degree_cap = true;
  bool betti_match = true;
  BettiPair betti{};
  std::vector<Edge> negative_edges;
  std::vector<Index> over_cap_nodes;  // nodes with more than k_max neighbors
  std::vector<Index> unreached_nodes;  // nodes outside the component of node 0

  bool ok() const { return non_negative && symmetric && connected && degree_cap && betti_match; }
};

AdmissibilityReport check_admissible(const WeightedGraph& g, Index k_max, const BettiPair& targets);

}  // namespace onn
