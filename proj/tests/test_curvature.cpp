#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "onn/curvature.hpp"
#include "onn/error.hpp"
#include "onn/generators.hpp"
#include "onn/union_find.hpp"
#include "oracles.hpp"

using namespace onn;

namespace {

WeightedGraph k3() { return build_graph(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}); }
WeightedGraph star3() { return build_graph(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}); }
WeightedGraph c4() { return build_graph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}); }

}  // namespace

TEST(Forman, Examples) {
  for (double k : forman_curvature(k3()).kappa) EXPECT_NEAR(k, 0.0, 1e-15);
  const CurvatureField p = forman_curvature(build_graph(3, {{0, 1, 1}, {1, 2, 1}}));
  EXPECT_NEAR(p.at(0, 1), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.at(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
  const CurvatureField s = forman_curvature(star3());
  for (double k : s.kappa) EXPECT_NEAR(k, 1.0 / std::sqrt(3.0) - 1.0, 1e-15);
  EXPECT_THROW(s.at(1, 2), Error);
  EXPECT_THROW(forman_curvature(build_graph(3, {{0, 1, 1}})), Error);
}

TEST(Forman, MatchesTextbookOracle) {
  CounterRng rng(31, 0);
  for (int t = 0; t < 60; ++t) {
    const WeightedGraph g = oracle::random_connected(rng, 2 + rng.below(40), 0.1);
    const Eigen::MatrixXd a = adjacency_matrix(g);
    const CurvatureField f = forman_curvature(g);
    ASSERT_EQ(f.edges.size(), g.edge_count());
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      const double want = oracle::forman(a, f.edges[i].u, f.edges[i].v);
      EXPECT_NEAR(f.kappa[i], want, 1e-12 * (1.0 + std::abs(want)));
      EXPECT_EQ(oracle::forman(a, f.edges[i].u, f.edges[i].v), oracle::forman(a, f.edges[i].u, f.edges[i].v));
    }
  }
}

TEST(Forman, SymmetricExactly) {
  CounterRng rng(37, 0);
  const WeightedGraph g = oracle::random_connected(rng, 40, 0.1);
  const CurvatureField f = forman_curvature(g);
  for (const Edge& e : g.edges()) EXPECT_EQ(f.at(e.u, e.v), f.at(e.v, e.u));
  // relabeling u <-> v through a reversed node order gives the same values
  std::vector<Edge> flipped;
  const Index n = g.node_count();
  for (const Edge& e : g.edges()) flipped.push_back({n - 1 - e.u, n - 1 - e.v, e.w});
  const CurvatureField h = forman_curvature(build_graph(n, flipped));
  for (const Edge& e : g.edges()) EXPECT_NEAR(h.at(n - 1 - e.u, n - 1 - e.v), f.at(e.u, e.v), 1e-12);
}

TEST(Forman, RelabelingInvariance) {
  CounterRng rng(41, 0);
  for (int t = 0; t < 20; ++t) {
    const Index n = 3 + rng.below(30);
    const WeightedGraph g = oracle::random_connected(rng, n, 0.15);
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (Index i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<Edge> moved;
    for (const Edge& e : g.edges()) moved.push_back({perm[e.u], perm[e.v], e.w});
    const CurvatureField f = forman_curvature(g);
    const CurvatureField h = forman_curvature(build_graph(n, moved));
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      EXPECT_NEAR(h.at(perm[f.edges[i].u], perm[f.edges[i].v]), f.kappa[i], 1e-12);
    }
  }
}

TEST(Forman, RegularGraphBound) {
  for (Index d = 2; d <= 6; ++d) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Index n = (d % 2 == 1) ? 20 + 2 * seed : 13 + seed;
      const WeightedGraph g = generate(GenSpec{GraphKind::KRegular, n, d, 1, seed, {}});
      for (double k : forman_curvature(g).kappa) EXPECT_LE(k, 2.0 / static_cast<double>(d) + 1e-12);
    }
  }
}

TEST(RicciLoss, Examples) {
  EXPECT_NEAR(ricci_loss(k3()), 0.0, 1e-15);
  EXPECT_NEAR(ricci_loss(star3()), 3.0 * (1.0 - 1.0 / std::sqrt(3.0)), 1e-12);
  RicciLossSpec target{RicciVariant::HingeTarget, 0.0, 0.0};
  EXPECT_NEAR(ricci_loss(k3(), target), 0.0, 1e-15);
  RicciLossSpec raised{RicciVariant::HingeTarget, 0.5, 0.0};
  EXPECT_NEAR(ricci_loss(k3(), raised), 3.0 * 0.25, 1e-12);
  // the boundary weight is inert
  RicciLossSpec boundary{RicciVariant::HingeZero, 0.0, 10.0};
  EXPECT_EQ(ricci_loss(star3(), boundary), ricci_loss(star3()));
}

TEST(RicciLoss, ZeroIffMinCurvatureNonNegative) {
  CounterRng rng(43, 0);
  for (int t = 0; t < 80; ++t) {
    const WeightedGraph g = oracle::random_connected(rng, 2 + rng.below(12), 0.4);
    const CurvatureField f = forman_curvature(g);
    EXPECT_EQ(ricci_loss(f) == 0.0, f.min() >= 0.0);
  }
}

TEST(ThresholdEdges, Examples) {
  const ThresholdSelection c = ricci_threshold_edges(c4(), 2);
  EXPECT_EQ(c.keep.size(), 4u);
  EXPECT_LT(c.threshold, forman_curvature(c4()).min());
  const WeightedGraph k4 = build_graph(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}});
  const ThresholdSelection k = ricci_threshold_edges(k4, 2);
  EXPECT_GE(k.keep.size(), 3u);
  EXPECT_TRUE(is_connected(build_graph(4, k.keep)));
  const WeightedGraph tree = build_graph(5, {{0, 1, 1}, {1, 2, 1}, {1, 3, 1}, {3, 4, 1}});
  EXPECT_EQ(ricci_threshold_edges(tree, 2).keep.size(), 4u);
}

TEST(ThresholdEdges, AlwaysConnectedAndQuota) {
  CounterRng rng(47, 0);
  for (int t = 0; t < 40; ++t) {
    const Index n = 3 + rng.below(40);
    const WeightedGraph g = oracle::random_connected(rng, n, 0.3);
    for (double k : {1.0, 2.0, 4.0}) {
      const ThresholdSelection s = ricci_threshold_edges(g, k);
      EXPECT_TRUE(is_connected(build_graph(n, s.keep)));
      const auto quota = static_cast<std::size_t>(std::ceil(k * static_cast<double>(n) / 2.0));
      EXPECT_GE(s.keep.size(), std::min(quota, g.edge_count()));
      EXPECT_TRUE(std::is_sorted(s.keep.begin(), s.keep.end(),
                                 [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; }));
    }
  }
}

TEST(CurvatureCsv, Format) {
  std::stringstream ss;
  write_curvature_csv(ss, forman_curvature(build_graph(3, {{0, 1, 1}, {1, 2, 1}})));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "u,v,kappa");
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first.rfind("0,1,", 0), 0u);
}
