#include "onn/admissible.hpp"

namespace onn {

AdmissibilityReport check_admissible(const WeightedGraph& g, Index k_max, const BettiPair& targets) {
  AdmissibilityReport r;
  for (const Edge& e : g.edges()) {
    if (!(e.w >= 0.0)) r.negative_edges.push_back(e);
  }
  r.non_negative = r.negative_edges.empty();
  for (Index i = 0; i < g.node_count(); ++i) {
    if (g.neighbor_count(i) > k_max) r.over_cap_nodes.push_back(i);
  }
  r.degree_cap = r.over_cap_nodes.empty();
  const std::vector<Index> labels = component_labels(g);
  for (Index i = 0; i < g.node_count(); ++i) {
    if (labels[i] != 0) r.unreached_nodes.push_back(i);
  }
  r.connected = g.node_count() > 0 && r.unreached_nodes.empty();
  r.betti = betti(g);
  r.betti_match = r.betti == targets;
  return r;
}

}  // namespace onn
