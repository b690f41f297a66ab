#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "onn/dynamics.hpp"
#include "onn/generators.hpp"
#include "onn/homology.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace onn;
using fixtures::code_of;
using fixtures::column;

namespace {

SemanticState random_state(CounterRng& rng, Index n, Index d) {
  StateMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) m(i, k) = rng.normal();
  return SemanticState(m);
}

LossConfig consensus_only() {
  LossConfig cfg;
  cfg.lambda_ricci = 0.0;
  cfg.lambda_homology = 0.0;
  return cfg;
}

// Unit weights make every C4 swap (triangle plus pendant) raise the ricci
// loss; these weights leave room for a strictly improving swap.
WeightedGraph stretched_c4() { return build_graph(4, {{0, 1, 0.1}, {1, 2, 0.3}, {2, 3, 0.15}, {0, 3, 1.0}}); }

// Bridges by deletion: an edge is a bridge iff removing it disconnects.
std::vector<Edge> bridges_by_deletion(const WeightedGraph& g) {
  std::vector<Edge> out;
  const Index c = component_count(g);
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    std::vector<Edge> rest;
    for (std::size_t j = 0; j < g.edge_count(); ++j)
      if (j != k) rest.push_back(g.edges()[j]);
    if (component_count(build_graph(g.node_count(), rest)) > c) out.push_back(g.edges()[k]);
  }
  return out;
}

}  // namespace

TEST(SemanticStep, HandComputedEuler) {
  OnnState st(column({0, 1, 2}), fixtures::path(3), 1);
  semantic_step(st, 1.0 / 3.0);
  EXPECT_NEAR(st.s.values()(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(st.s.values()(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(st.s.values()(2, 0), 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(consensus_loss(st.s, st.g), 4.0 / 9.0, 1e-15);
  EXPECT_EQ(st.iter, 1u);
}

TEST(SemanticStep, FixedPointAndErrors) {
  OnnState st(column({2, 2, 2, 2}), fixtures::cycle(4), 1);
  semantic_step(st, 0.9);
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(st.s.values()(i, 0), 2.0);
  EXPECT_EQ(code_of([&] { semantic_step(st, 0.0); }), ErrorCode::InvalidParams);
}

TEST(SemanticStep, DescentWithSafeStep) {
  CounterRng rng(201, 0);
  const WeightedGraph g = oracle::random_connected(rng, 30, 0.1);
  const ConnectionOperator l1 = ConnectionOperator::scaled_laplacian(0.2);
  LossConfig cfg;
  cfg.connection = l1;
  const double eta = 1.0 / (lambda_max_iterative(g) + l1.norm(g));
  OnnState st(random_state(rng, 30, 3), g, 1);
  double prev = total_loss(st.s, st.g, cfg).total;
  for (int k = 0; k < 1000; ++k) {
    semantic_step(st, eta, l1);
    const double v = total_loss(st.s, st.g, cfg).total;
    ASSERT_LE(v, prev);
    prev = v;
  }
}

TEST(SurgeryDecay, Examples) {
  LossConfig loss;
  loss.betti_targets = {1, 0};
  SurgeryConfig cfg{SurgeryMode::Decay, 1.0, 0.25, 0.0};
  OnnState st(column({0, 0, 0, 0}), fixtures::cycle(4), 1);
  EXPECT_TRUE(surgery_decay(st, cfg, loss).changed());
  for (const Edge& e : st.g.edges()) EXPECT_DOUBLE_EQ(e.w, 0.75);
  EXPECT_EQ(betti(st.g), (BettiPair{1, 1}));

  loss.betti_targets = {1, 1};
  OnnState matched(column({0, 0, 0, 0}), fixtures::cycle(4), 1);
  EXPECT_EQ(surgery_decay(matched, cfg, loss).status, SurgeryOutcome::Status::NotTriggered);
  for (const Edge& e : matched.g.edges()) EXPECT_EQ(e.w, 1.0);

  loss.betti_targets = {1, 0};
  cfg.delta = 0.0;
  OnnState zero(column({0, 0, 0, 0}), fixtures::cycle(4), 1);
  surgery_decay(zero, cfg, loss);
  for (const Edge& e : zero.g.edges()) EXPECT_EQ(e.w, 1.0);
}

TEST(SurgeryRewire, TreeHasNoEligibleEdge) {
  OnnState st(column({0, 5, 1, 3}), fixtures::star(3), 1);
  const SurgeryOutcome out = surgery_rewire(st, SurgeryConfig{}, LossConfig{});
  EXPECT_EQ(out.status, SurgeryOutcome::Status::NoEligibleEdge);
  EXPECT_EQ(out.swaps, 0u);
  EXPECT_EQ(st.g.edge_count(), 3u);
  EXPECT_TRUE(st.g.has_edge(0, 1) && st.g.has_edge(0, 2) && st.g.has_edge(0, 3));
}

TEST(SurgeryRewire, StretchedCycleEdgeIsSwapped) {
  const WeightedGraph g = stretched_c4();
  ASSERT_LT(forman_curvature(g).at(0, 1), 0.0);
  OnnState st(column({0, 10, 10.5, 0.5}), g, 1);
  const SurgeryOutcome out = surgery_rewire(st, SurgeryConfig{}, LossConfig{});
  EXPECT_EQ(out.status, SurgeryOutcome::Status::Applied);
  EXPECT_EQ(out.swaps, 1u);
  EXPECT_FALSE(st.g.has_edge(0, 1));
  EXPECT_TRUE(st.g.has_edge(1, 3));
  EXPECT_EQ(betti(st.g), (BettiPair{1, 1}));
  EXPECT_LT(ricci_loss(st.g), ricci_loss(g));
}

TEST(SurgeryRewire, NonNegativeCurvatureMeansNoSwaps) {
  OnnState st(column({0, 1, 2, 3, 4}), fixtures::complete(5), 1);
  const SurgeryOutcome out = surgery_rewire(st, SurgeryConfig{}, LossConfig{});
  EXPECT_EQ(out.swaps, 0u);
  EXPECT_FALSE(out.changed());
}

TEST(Surgery, PreservesBettiAndNeverRaisesRicci) {
  CounterRng rng(211, 0);
  for (int t = 0; t < 40; ++t) {
    const Index n = 8 + rng.below(40);
    const WeightedGraph g = oracle::random_connected(rng, n, 0.12, 0.2, 2.0);
    for (SurgeryMode mode : {SurgeryMode::Rewire, SurgeryMode::RicciFlow}) {
      OnnState st(random_state(rng, n, 3), g, t);
      SurgeryConfig cfg;
      cfg.mode = mode;
      cfg.delta = 0.3;
      const BettiPair before = betti(st.g);
      const double ricci_before = ricci_loss(st.g);
      const SurgeryOutcome out = apply_surgery(st, cfg, LossConfig{});
      EXPECT_EQ(betti(st.g), before);
      EXPECT_EQ(st.g.edge_count(), g.edge_count());
      if (out.changed()) {
        EXPECT_GT(out.swaps, 0u);
        EXPECT_LT(ricci_loss(st.g), ricci_before);
      } else {
        EXPECT_EQ(oracle::edge_vector(st.g), oracle::edge_vector(g));
      }
    }
  }
}

TEST(Surgery, ValidatesConfig) {
  SurgeryConfig cfg;
  cfg.p = 1.5;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::InvalidParams);
  cfg = {};
  cfg.mode = SurgeryMode::Decay;
  cfg.delta = 1.0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::InvalidParams);
  cfg = {};
  cfg.delta = 0.0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::InvalidParams);
  cfg = {};
  cfg.theta = -1;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::InvalidParams);
}

TEST(Bridges, MatchesDeletionOracle) {
  CounterRng rng(223, 0);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + rng.below(30);
    std::vector<Edge> edges;
    for (Index u = 0; u < n; ++u)
      for (Index v = u + 1; v < n; ++v)
        if (rng.bernoulli(0.12)) edges.push_back({u, v, 1.0});
    const WeightedGraph g = build_graph(n, edges);
    EXPECT_EQ(bridges(g), bridges_by_deletion(g));
  }
}

TEST(Run, ZeroIterationsGivesInitialRow) {
  RunConfig cfg;
  const TrajectoryRecord tr = run(OnnState(column({0, 1, 2}), fixtures::path(3), 1), cfg);
  ASSERT_EQ(tr.rows.size(), 1u);
  EXPECT_EQ(tr.rows[0].iter, 0u);
  EXPECT_DOUBLE_EQ(tr.rows[0].loss.consensus, 1.0);
}

TEST(Run, PathContractionOracle) {
  RunConfig cfg;
  cfg.iterations = 150;
  cfg.loss = consensus_only();
  const TrajectoryRecord tr = run(OnnState(column({-1.5, 0.2, -0.3, 1.6}), fixtures::path(4), 1), cfg);
  ASSERT_EQ(tr.rows.size(), 151u);
  const double lam2 = 2.0 - std::sqrt(2.0);
  const double eta = 1.0 / (2.0 + std::sqrt(2.0));
  const double ratio = std::pow(1.0 - eta * lam2, 2);
  EXPECT_NEAR(ratio, 0.68629, 1e-5);
  const double observed = tr.rows[150].loss.total / tr.rows[149].loss.total;
  EXPECT_NEAR(observed, ratio, 0.01 * ratio);
  const RateFit fit = fit_rate(tr);
  EXPECT_NEAR(fit.mu_emp, -std::log(ratio), 0.02 * -std::log(ratio));
  EXPECT_GT(fit.r_squared, 0.999);
  for (std::size_t k = 1; k < tr.rows.size(); ++k) EXPECT_LE(tr.rows[k].loss.total, tr.rows[k - 1].loss.total);
}

TEST(Run, Deterministic) {
  GenSpec spec{GraphKind::RandomGeometric, 60, 6, 1, 3, {}};
  const WeightedGraph g = generate(spec);
  RunConfig cfg;
  cfg.iterations = 200;
  cfg.surgery.p = 0.6;
  cfg.loss.betti_targets = betti(g);
  const SemanticState s = init_state(60, 3, InitLaw::Gaussian, 4);
  const TrajectoryRecord a = run(OnnState(s, g, 9), cfg);
  const TrajectoryRecord b = run(OnnState(s, g, 9), cfg);
  std::stringstream sa, sb;
  write_trajectory_csv(sa, a);
  write_trajectory_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  const TrajectoryRecord c = run(OnnState(s, g, 10), cfg);
  std::stringstream sc;
  write_trajectory_csv(sc, c);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Run, BettiInvarianceAndMonotoneSemanticPhase) {
  for (SurgeryMode mode : {SurgeryMode::Rewire, SurgeryMode::RicciFlow}) {
    GenSpec spec{GraphKind::Community, 80, 2, 5, 7, {}};
    const WeightedGraph g = generate(spec);
    RunConfig cfg;
    cfg.iterations = 400;
    cfg.surgery.mode = mode;
    cfg.surgery.p = 0.6;
    cfg.surgery.k_target = 2;
    cfg.loss.betti_targets = betti(g);
    const TrajectoryRecord tr = run(OnnState(init_state(80, 4, InitLaw::Gaussian, 2), g, 3), cfg);
    for (const TrajectoryRow& r : tr.rows) {
      EXPECT_EQ(r.beta0, 1u);
      EXPECT_EQ(r.beta1, g.edge_count() - 80 + 1);
      EXPECT_EQ(r.edges, g.edge_count());
    }
    // Rows without a state-changing surgery are pure semantic steps.
    for (std::size_t k = 1; k < tr.rows.size(); ++k)
      if (!tr.rows[k].surgery) EXPECT_LE(tr.rows[k].loss.total, tr.rows[k - 1].loss.total);
  }
}

TEST(Run, FejerMonitorOnRewire) {
  GenSpec spec{GraphKind::RandomGeometric, 120, 6, 1, 5, {}};
  const WeightedGraph g = generate(spec);
  RunConfig cfg;
  cfg.iterations = 600;
  cfg.surgery.p = 0.6;
  cfg.loss.betti_targets = betti(g);
  const TrajectoryRecord tr = run(OnnState(init_state(120, 4, InitLaw::Gaussian, 8), g, 1), cfg);
  ASSERT_FALSE(tr.events.empty());
  const double xi = surgery_efficiency(tr);
  ASSERT_GT(xi, 1.0);
  std::size_t increases = 0;
  for (std::size_t k = 1; k < tr.rows.size(); ++k) increases += tr.rows[k].loss.total > tr.rows[k - 1].loss.total;
  EXPECT_LT(double(increases) / double(tr.rows.size() - 1), 0.05);
  // Windowed means decrease strictly until V drops below 1e-3 V0.
  const double v0 = tr.rows.front().loss.total;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start + 50 <= tr.rows.size(); start += 50) {
    double mean = 0.0;
    for (std::size_t k = start; k < start + 50; ++k) mean += tr.rows[k].loss.total / 50.0;
    if (mean < 1e-3 * v0) break;
    EXPECT_LT(mean, prev) << "window at " << start;
    prev = mean;
  }
}

TEST(FitRate, SyntheticCases) {
  std::vector<double> x, v, c;
  for (int k = 0; k < 200; ++k) {
    x.push_back(k);
    v.push_back(3.0 * std::exp(-0.01 * k));
    c.push_back(2.0);
  }
  const RateFit e = fit_exponential(x, v);
  EXPECT_NEAR(e.mu_emp, 0.01, 1e-12);
  EXPECT_NEAR(e.r_squared, 1.0, 1e-12);
  const RateFit f = fit_exponential(x, c);
  EXPECT_EQ(f.mu_emp, 0.0);
  v[5] = 0.0;
  EXPECT_EQ(code_of([&] { fit_exponential(x, v); }), ErrorCode::NonPositiveLoss);
}

TEST(FitRate, TrailingWindow) {
  TrajectoryRecord tr;
  for (int k = 0; k <= 100; ++k) {
    TrajectoryRow r;
    r.iter = k;
    // Transient in the first rows must be discarded by the window.
    r.loss.total = k < 5 ? 100.0 : std::exp(-0.05 * k);
    tr.rows.push_back(r);
  }
  EXPECT_NEAR(fit_rate(tr, 0.9).mu_emp, 0.05, 1e-12);
}

TEST(SurgeryEfficiency, Examples) {
  TrajectoryRecord tr;
  EXPECT_EQ(code_of([&] { surgery_efficiency(tr); }), ErrorCode::NoSurgeryEvents);
  tr.events.push_back({10, 0.30, 0.25, 1.00, 1.02});
  EXPECT_NEAR(surgery_efficiency(tr), 2.5, 1e-12);
  tr.events = {{10, 0.30, 0.25, 1.00, 1.00}};
  EXPECT_EQ(code_of([&] { surgery_efficiency(tr); }), ErrorCode::ZeroDenominator);
}

TEST(SurgeryEfficiency, DecayEventMeasuresCurvatureChange) {
  // Targets (1, 0) on C4 trigger decay; only the ricci term moves, and C4
  // stays non-negatively curved, so the topology change is exactly zero.
  RunConfig cfg;
  cfg.iterations = 3;
  cfg.surgery = {SurgeryMode::Decay, 1.0, 0.5, 0.0};
  cfg.loss.betti_targets = {1, 0};
  const TrajectoryRecord tr = run(OnnState(column({0, 1, 2, 3}), fixtures::cycle(4), 1), cfg);
  ASSERT_EQ(tr.events.size(), 3u);
  for (const SurgeryEvent& e : tr.events) {
    EXPECT_DOUBLE_EQ(e.topo_before, e.topo_after);
    EXPECT_NEAR(e.cons_after, 0.5 * e.cons_before, 1e-12 * e.cons_before);
  }
  EXPECT_EQ(surgery_efficiency(tr), 0.0);
}

TEST(RoaMember, Examples) {
  EXPECT_TRUE(roa_member(fixtures::cycle(4), {1, 1}));
  EXPECT_FALSE(roa_member(fixtures::path(3), {1, 1}));
  EXPECT_FALSE(roa_member(build_graph(4, {{0, 1, 1}, {2, 3, 1}}), {1, 0}));
}

TEST(TrajectoryCsv, Header) {
  RunConfig cfg;
  cfg.iterations = 1;
  std::stringstream ss;
  write_trajectory_csv(ss, run(OnnState(column({0, 1, 2}), fixtures::path(3), 1), cfg));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "iter,loss_total,loss_consensus,loss_ricci,loss_homology,beta0,beta1,lambda2,surgery,swaps,xi_running");
  std::string row;
  std::getline(ss, row);
  EXPECT_EQ(row.rfind("0,", 0), 0u);
  EXPECT_NE(row.find("nan"), std::string::npos);
}
