#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "onn/graph.hpp"

namespace onn {

struct BettiPair {
  Index beta0 = 0;
  Index beta1 = 0;

  friend bool operator==(const BettiPair&, const BettiPair&) = default;
};

// beta0 by union-find, beta1 = E - V + beta0.
BettiPair betti(const WeightedGraph& g);

// Squared integer deviation from the targets.
double homology_loss(const BettiPair& actual, const BettiPair& targets);
double homology_loss(const WeightedGraph& g, const BettiPair& targets);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct PersistencePair {
  double birth;
  double death;  // kInf for essential classes

  bool essential() const { return death == kInf; }
  double persistence() const { return death - birth; }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  std::vector<PersistencePair> dim0;
  std::vector<PersistencePair> dim1;

  const std::vector<PersistencePair>& dim(int p) const { return p == 0 ? dim0 : dim1; }
};

// Sublevel weight filtration: vertices at t = 0, edges at t = w in (w, u, v)
// order. A merging edge kills the component whose minimum node index is
// larger (both were born at 0); a cycle-closing edge opens an essential
// 1-class. Pairs are returned sorted by (birth, death).
PersistenceDiagram persistence(const WeightedGraph& g);

// Bottleneck distance in dimension `dim`. Essential classes are matched
// among themselves by sorted birth; the finite parts use the exact
// threshold search over L-infinity and diagonal costs with a bipartite
// perfect-matching test. Errors: InfiniteDistance when the essential counts
// differ.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim);
double bottleneck(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b);

// Smallest gap between consecutive distinct finite critical values of the
// diagram (0 included); kInf when fewer than two distinct values exist.
double critical_gap(const PersistenceDiagram& pd);

struct EdgeRef {
  Index u;
  Index v;
};

// Whether removing `removal` and then adding `addition` leaves (beta0,
// beta1) unchanged. Does not modify g. Errors: EdgeNotFound, DuplicateEdge,
// IndexOutOfRange, SelfLoop.
bool move_preserves_betti(const WeightedGraph& g, std::optional<EdgeRef> removal, std::optional<Edge> addition);

// CSV `dim,birth,death` with `inf` for essential classes.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& pd);

}  // namespace onn
