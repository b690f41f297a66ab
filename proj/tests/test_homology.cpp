#include <gtest/gtest.h>

#include <sstream>

#include "onn/error.hpp"
#include "onn/homology.hpp"
#include "onn/union_find.hpp"
#include "oracles.hpp"

using namespace onn;

namespace {

WeightedGraph c4() { return build_graph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}); }

std::vector<PersistencePair> random_diagram(CounterRng& rng, std::size_t max_pairs) {
  std::vector<PersistencePair> d;
  const std::size_t m = rng.below(max_pairs + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double b = rng.uniform(0.0, 1.0);
    d.push_back({b, b + rng.uniform(0.0, 1.0)});
  }
  return d;
}

}  // namespace

TEST(Betti, Examples) {
  EXPECT_EQ(betti(c4()), (BettiPair{1, 1}));
  EXPECT_EQ(betti(build_graph(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}})), (BettiPair{2, 2}));
  EXPECT_EQ(betti(build_graph(5, std::span<const Edge>{})), (BettiPair{5, 0}));
}

TEST(Betti, EulerAndOracle) {
  CounterRng rng(53, 0);
  for (int t = 0; t < 100; ++t) {
    const Index n = 1 + rng.below(30);
    std::vector<Edge> edges;
    for (Index u = 0; u < n; ++u)
      for (Index v = u + 1; v < n; ++v)
        if (rng.bernoulli(0.08)) edges.push_back({u, v, rng.uniform(0.1, 1.0)});
    const WeightedGraph g = build_graph(n, edges);
    const BettiPair b = betti(g);
    EXPECT_EQ(b.beta0, oracle::components(adjacency_matrix(g)));
    EXPECT_EQ(b.beta1 + n, g.edge_count() + b.beta0);
    EXPECT_GE(b.beta0, 1u);
  }
}

TEST(HomologyLoss, Examples) {
  EXPECT_EQ(homology_loss(c4(), {1, 1}), 0.0);
  EXPECT_EQ(homology_loss(build_graph(3, {{0, 1, 1}, {1, 2, 1}}), {1, 1}), 1.0);
  EXPECT_EQ(homology_loss(build_graph(5, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}), {1, 1}), 4.0);
  EXPECT_EQ(homology_loss(build_graph(4, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}), {1, 1}), 1.0);
}

TEST(Persistence, Examples) {
  const PersistenceDiagram p = persistence(build_graph(3, {{0, 1, 0.3}, {1, 2, 0.7}}));
  EXPECT_EQ(p.dim0, (std::vector<PersistencePair>{{0, 0.3}, {0, 0.7}, {0, kInf}}));
  EXPECT_TRUE(p.dim1.empty());
  const PersistenceDiagram c = persistence(build_graph(3, {{0, 1, 0.2}, {1, 2, 0.5}, {0, 2, 0.9}}));
  EXPECT_EQ(c.dim0, (std::vector<PersistencePair>{{0, 0.2}, {0, 0.5}, {0, kInf}}));
  EXPECT_EQ(c.dim1, (std::vector<PersistencePair>{{0.9, kInf}}));
  const PersistenceDiagram e = persistence(build_graph(2, std::span<const Edge>{}));
  EXPECT_EQ(e.dim0, (std::vector<PersistencePair>{{0, kInf}, {0, kInf}}));
  EXPECT_TRUE(e.dim1.empty());
}

TEST(Persistence, CountsMatchBetti) {
  CounterRng rng(59, 0);
  for (int t = 0; t < 100; ++t) {
    const Index n = 1 + rng.below(40);
    std::vector<Edge> edges;
    for (Index u = 0; u < n; ++u)
      for (Index v = u + 1; v < n; ++v)
        if (rng.bernoulli(0.1)) edges.push_back({u, v, rng.uniform(0.1, 1.0)});
    const WeightedGraph g = build_graph(n, edges);
    const PersistenceDiagram pd = persistence(g);
    const BettiPair b = betti(g);
    EXPECT_EQ(pd.dim0.size(), n);
    std::size_t finite = 0;
    for (const auto& p : pd.dim0) {
      EXPECT_GE(p.death, p.birth);
      finite += p.essential() ? 0 : 1;
    }
    EXPECT_EQ(finite, n - b.beta0);
    EXPECT_EQ(pd.dim1.size(), b.beta1);
    for (const auto& p : pd.dim1) EXPECT_TRUE(p.essential());
  }
}

TEST(Persistence, ElderRuleKeepsSmallerRoot) {
  // Equal weights: edges processed in (w, u, v) order; node 0's component survives.
  const PersistenceDiagram pd = persistence(build_graph(4, {{2, 3, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}}));
  EXPECT_EQ(pd.dim0, (std::vector<PersistencePair>{{0, 1.0}, {0, 1.0}, {0, 1.0}, {0, kInf}}));
}

TEST(Bottleneck, Examples) {
  const std::vector<PersistencePair> a{{0, 0.3}, {0, kInf}};
  EXPECT_EQ(bottleneck(a, a), 0.0);
  EXPECT_NEAR(bottleneck({{0, 0.3}, {0, kInf}}, {{0, 0.35}, {0, kInf}}), 0.05, 1e-15);
  EXPECT_NEAR(bottleneck({{0, kInf}}, {{0.4, 0.5}, {0, kInf}}), 0.05, 1e-15);
  EXPECT_THROW(bottleneck({{0, kInf}}, {{0, kInf}, {0, kInf}}), Error);
  EXPECT_NEAR(bottleneck({{0, kInf}}, {{0.25, kInf}}), 0.25, 1e-15);
}

TEST(Bottleneck, MatchesExhaustiveOracle) {
  CounterRng rng(61, 0);
  for (int t = 0; t < 150; ++t) {
    const auto a = random_diagram(rng, 4);
    const auto b = random_diagram(rng, 4);
    EXPECT_NEAR(bottleneck(a, b), oracle::bottleneck(a, b), 1e-12);
  }
}

TEST(Bottleneck, Pseudometric) {
  CounterRng rng(67, 0);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_diagram(rng, 6);
    const auto b = random_diagram(rng, 6);
    const auto c = random_diagram(rng, 6);
    EXPECT_EQ(bottleneck(a, b), bottleneck(b, a));
    EXPECT_LE(bottleneck(a, c), bottleneck(a, b) + bottleneck(b, c) + 1e-12);
    EXPECT_EQ(bottleneck(a, a), 0.0);
  }
}

TEST(Bottleneck, StabilityUnderWeightNoise) {
  CounterRng rng(71, 0);
  for (int t = 0; t < 60; ++t) {
    const Index n = 2 + rng.below(40);
    const WeightedGraph g = oracle::random_connected(rng, n, 0.1, 0.1, 1.0);
    for (double eps : {1e-3, 1e-2}) {
      std::vector<Edge> edges = oracle::edge_vector(g);
      for (Edge& e : edges) e.w += rng.uniform(-eps, eps);
      const WeightedGraph h = build_graph(n, edges);
      EXPECT_LE(bottleneck(persistence(g), persistence(h), 0), eps);
      EXPECT_LE(bottleneck(persistence(g), persistence(h), 1), eps);
    }
  }
}

TEST(CriticalGap, Values) {
  EXPECT_NEAR(critical_gap(persistence(build_graph(3, {{0, 1, 0.3}, {1, 2, 0.7}}))), 0.3, 1e-15);
  EXPECT_EQ(critical_gap(persistence(build_graph(2, std::span<const Edge>{}))), kInf);
}

TEST(MovePreservesBetti, Examples) {
  EXPECT_TRUE(move_preserves_betti(c4(), EdgeRef{0, 1}, Edge{0, 2, 1.0}));
  EXPECT_FALSE(move_preserves_betti(c4(), EdgeRef{0, 1}, std::nullopt));
  EXPECT_TRUE(move_preserves_betti(c4(), std::nullopt, std::nullopt));
  EXPECT_THROW(move_preserves_betti(c4(), EdgeRef{0, 2}, std::nullopt), Error);
  EXPECT_THROW(move_preserves_betti(c4(), std::nullopt, Edge{0, 1, 1.0}), Error);
  EXPECT_THROW(move_preserves_betti(c4(), std::nullopt, Edge{0, 9, 1.0}), Error);
  EXPECT_THROW(move_preserves_betti(c4(), std::nullopt, Edge{2, 2, 1.0}), Error);
}

TEST(MovePreservesBetti, AgreesWithRebuild) {
  CounterRng rng(73, 0);
  for (int t = 0; t < 200; ++t) {
    const Index n = 3 + rng.below(12);
    const WeightedGraph g = oracle::random_connected(rng, n, 0.2);
    const Edge r = g.edges()[rng.below(g.edge_count())];
    Index u = rng.below(n), v = rng.below(n);
    if (u == v || (g.has_edge(u, v) && !(std::min(u, v) == r.u && std::max(u, v) == r.v))) continue;
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
      if (!(e.u == r.u && e.v == r.v)) edges.push_back(e);
    edges.push_back({u, v, 1.0});
    const bool want = betti(build_graph(n, edges)) == betti(g);
    EXPECT_EQ(move_preserves_betti(g, EdgeRef{r.u, r.v}, Edge{u, v, 1.0}), want);
  }
}

TEST(UnionFind, Basics) {
  UnionFind uf(5);
  EXPECT_EQ(uf.set_count(), 5u);
  EXPECT_TRUE(uf.unite(0, 1));
  EXPECT_FALSE(uf.unite(1, 0));
  EXPECT_TRUE(uf.connected(0, 1));
  EXPECT_FALSE(uf.connected(0, 2));
  EXPECT_EQ(uf.set_count(), 4u);
}

TEST(DiagramCsv, Format) {
  std::stringstream ss;
  write_diagram_csv(ss, persistence(build_graph(3, {{0, 1, 0.2}, {1, 2, 0.5}, {0, 2, 0.9}})));
  EXPECT_EQ(ss.str(), "dim,birth,death\n0,0,0.2\n0,0,0.5\n0,0,inf\n1,0.9,inf\n");
}
