#include "onn/homology.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "onn/error.hpp"
#include "onn/union_find.hpp"

namespace onn {

BettiPair betti(const WeightedGraph& g) {
  const Index b0 = component_count(g);
  return {b0, g.edge_count() + b0 - g.node_count()};
}

double homology_loss(const BettiPair& actual, const BettiPair& targets) {
  const double d0 = static_cast<double>(actual.beta0) - static_cast<double>(targets.beta0);
  const double d1 = static_cast<double>(actual.beta1) - static_cast<double>(targets.beta1);
  return d0 * d0 + d1 * d1;
}

double homology_loss(const WeightedGraph& g, const BettiPair& targets) { return homology_loss(betti(g), targets); }

PersistenceDiagram persistence(const WeightedGraph& g) {
  std::vector<Edge> order(g.edges().begin(), g.edges().end());
  std::stable_sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) { return a.w < b.w; });
  PersistenceDiagram pd;
  UnionFind uf(g.node_count());
  for (const Edge& e : order) {
    // unite_min_root keeps the root at the component minimum, so the
    // surviving component is the one holding the smaller minimum index.
    if (uf.unite_min_root(e.u, e.v)) {
      pd.dim0.push_back({0.0, e.w});
    } else {
      pd.dim1.push_back({e.w, kInf});
    }
  }
  for (Index i = 0; i < uf.set_count(); ++i) pd.dim0.push_back({0.0, kInf});
  auto by_pair = [](const PersistencePair& a, const PersistencePair& b) {
    return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
  };
  std::sort(pd.dim0.begin(), pd.dim0.end(), by_pair);
  std::sort(pd.dim1.begin(), pd.dim1.end(), by_pair);
  return pd;
}

namespace {

// Hopcroft-Karp on an explicit bipartite adjacency.
class BipartiteMatcher {
 public:
  explicit BipartiteMatcher(std::size_t n) : adj_(n), match_l_(n, kNone), match_r_(n, kNone), dist_(n) {}

  void add(std::size_t l, std::size_t r) { adj_[l].push_back(r); }

  std::size_t max_matching() {
    std::size_t size = 0;
    while (bfs()) {
      for (std::size_t l = 0; l < adj_.size(); ++l) {
        if (match_l_[l] == kNone && dfs(l)) ++size;
      }
    }
    return size;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool bfs() {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      if (match_l_[l] == kNone) {
        dist_[l] = 0;
        q.push(l);
      } else {
        dist_[l] = kNone;
      }
    }
    while (!q.empty()) {
      const std::size_t l = q.front();
      q.pop();
      for (std::size_t r : adj_[l]) {
        const std::size_t next = match_r_[r];
        if (next == kNone) {
          found = true;
        } else if (dist_[next] == kNone) {
          dist_[next] = dist_[l] + 1;
          q.push(next);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t l) {
    for (std::size_t r : adj_[l]) {
      const std::size_t next = match_r_[r];
      if (next == kNone || (dist_[next] == dist_[l] + 1 && dfs(next))) {
        match_l_[l] = r;
        match_r_[r] = l;
        return true;
      }
    }
    dist_[l] = kNone;
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_l_;
  std::vector<std::size_t> match_r_;
  std::vector<std::size_t> dist_;
};

double linf(const PersistencePair& a, const PersistencePair& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_cost(const PersistencePair& a) { return a.persistence() / 2.0; }

// Left side: A points then one diagonal slot per B point. Right side: B
// points then one diagonal slot per A point.
bool perfect_matching_within(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b,
                             double eps) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  BipartiteMatcher matcher(m + n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (linf(a[i], b[j]) <= eps) matcher.add(i, j);
    }
    if (diagonal_cost(a[i]) <= eps) matcher.add(i, n + i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (diagonal_cost(b[j]) <= eps) matcher.add(m + j, j);
    for (std::size_t i = 0; i < m; ++i) matcher.add(m + j, n + i);
  }
  return matcher.max_matching() == m + n;
}

double finite_bottleneck(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<double> candidates{0.0};
  for (const auto& p : a) candidates.push_back(diagonal_cost(p));
  for (const auto& q : b) candidates.push_back(diagonal_cost(q));
  for (const auto& p : a) {
    for (const auto& q : b) candidates.push_back(linf(p, q));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;  // matching everything to the diagonal is feasible here
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (perfect_matching_within(a, b, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

}  // namespace

double bottleneck(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b) {
  std::vector<PersistencePair> fa, fb;
  std::vector<double> ea, eb;
  for (const auto& p : a) (p.essential() ? ea.push_back(p.birth) : fa.push_back(p));
  for (const auto& q : b) (q.essential() ? eb.push_back(q.birth) : fb.push_back(q));
  if (ea.size() != eb.size()) {
    throw Error(ErrorCode::InfiniteDistance, "essential class counts differ: " + std::to_string(ea.size()) +
                                                 " vs " + std::to_string(eb.size()));
  }
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  double essential = 0.0;
  for (std::size_t i = 0; i < ea.size(); ++i) essential = std::max(essential, std::abs(ea[i] - eb[i]));
  return std::max(essential, finite_bottleneck(fa, fb));
}

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim) {
  if (dim != 0 && dim != 1) throw Error(ErrorCode::InvalidParams, "dimension must be 0 or 1");
  return bottleneck(a.dim(dim), b.dim(dim));
}

double critical_gap(const PersistenceDiagram& pd) {
  std::vector<double> values{0.0};
  for (const auto* dgm : {&pd.dim0, &pd.dim1}) {
    for (const auto& p : *dgm) {
      values.push_back(p.birth);
      if (!p.essential()) values.push_back(p.death);
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  double gap = kInf;
  for (std::size_t i = 1; i < values.size(); ++i) gap = std::min(gap, values[i] - values[i - 1]);
  return gap;
}

bool move_preserves_betti(const WeightedGraph& g, std::optional<EdgeRef> removal, std::optional<Edge> addition) {
  const Index n = g.node_count();
  Index ru = n, rv = n;
  if (removal) {
    ru = std::min(removal->u, removal->v);
    rv = std::max(removal->u, removal->v);
    if (!g.has_edge(ru, rv)) {
      throw Error(ErrorCode::EdgeNotFound, "(" + std::to_string(ru) + "," + std::to_string(rv) + ")");
    }
  }
  if (addition) {
    const Index au = addition->u, av = addition->v;
    if (au >= n || av >= n) throw Error(ErrorCode::IndexOutOfRange, "addition endpoint");
    if (au == av) throw Error(ErrorCode::SelfLoop, "node " + std::to_string(au));
    const bool re_adds_removed = removal && std::min(au, av) == ru && std::max(au, av) == rv;
    if (g.has_edge(au, av) && !re_adds_removed) {
      throw Error(ErrorCode::DuplicateEdge, "(" + std::to_string(au) + "," + std::to_string(av) + ")");
    }
    if (!(addition->w >= 0.0)) throw Error(ErrorCode::NegativeWeight, "addition weight");
  }
  if (!removal && !addition) return true;

  const BettiPair before = betti(g);
  UnionFind uf(n);
  Index edge_count = 0;
  for (const Edge& e : g.edges()) {
    if (removal && e.u == ru && e.v == rv) continue;
    uf.unite(e.u, e.v);
    ++edge_count;
  }
  if (addition && addition->w > 0.0) {
    uf.unite(addition->u, addition->v);
    ++edge_count;
  }
  const Index b0 = uf.set_count();
  const BettiPair after{b0, edge_count + b0 - n};
  return before == after;
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& pd) {
  out << "dim,birth,death\n";
  for (int p = 0; p < 2; ++p) {
    for (const auto& pair : pd.dim(p)) {
      out << p << ',' << format_double(pair.birth) << ',' << (pair.essential() ? "inf" : format_double(pair.death))
          << '\n';
    }
  }
}

}  // namespace onn
