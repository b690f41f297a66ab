#include "onn/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "onn/curvature.hpp"
#include "onn/error.hpp"
#include "onn/kernels.hpp"

namespace onn {

namespace {

// Mutable adjacency for evaluating a swap's curvature change locally. Each
// node's neighbor list stays sorted by node, so degrees and neighbor sums
// are accumulated in the same order as in WeightedGraph and the forman
// kernel.
class LocalAdjacency {
 public:
  explicit LocalAdjacency(const WeightedGraph& g) : adj_(g.node_count()) {
    for (Index i = 0; i < g.node_count(); ++i) adj_[i].assign(g.neighbors(i).begin(), g.neighbors(i).end());
  }

  void add(Index u, Index v, double w) {
    insert(u, v, w);
    insert(v, u, w);
  }

  double remove(Index u, Index v) {
    const double w = erase(u, v);
    erase(v, u);
    return w;
  }

  // Sum of hinge terms over every edge with an endpoint in `zone`.
  double zone_loss(const std::vector<Index>& zone, const std::vector<char>& in_zone, const RicciLossSpec& spec) const {
    double acc = 0.0;
    for (Index a : zone) {
      for (const Neighbor& nb : adj_[a]) {
        if (in_zone[nb.node] && nb.node < a) continue;
        acc += ricci_hinge(kappa(a, nb.node, nb.w), spec);
      }
    }
    return acc;
  }

  const std::vector<Neighbor>& neighbors(Index i) const { return adj_[i]; }

 private:
  double degree(Index i) const {
    double d = 0.0;
    for (const Neighbor& nb : adj_[i]) d += nb.w;
    return d;
  }

  double r(Index i) const { return 1.0 / std::sqrt(degree(i)); }

  double s(Index i) const {
    double acc = 0.0;
    for (const Neighbor& nb : adj_[i]) acc += nb.w * r(nb.node);
    return acc;
  }

  double kappa(Index a, Index b, double w) const { return 2.0 * w * (r(a) + r(b)) - (s(a) + s(b)); }

  static bool by_node(const Neighbor& nb, Index node) { return nb.node < node; }

  void insert(Index u, Index v, double w) {
    auto& list = adj_[u];
    list.insert(std::lower_bound(list.begin(), list.end(), v, by_node), Neighbor{v, w});
  }

  double erase(Index u, Index v) {
    auto& list = adj_[u];
    auto it = std::lower_bound(list.begin(), list.end(), v, by_node);
    const double w = it->w;
    list.erase(it);
    return w;
  }

  std::vector<std::vector<Neighbor>> adj_;
};

// Ricci-loss change of replacing edge (i, j) by a unit edge (u, v).
double swap_delta(LocalAdjacency& adj, Index n, Edge removal, Index u, Index v, const RicciLossSpec& spec) {
  std::vector<char> in_zone(n, 0);
  std::vector<Index> zone;
  auto mark = [&](Index x) {
    if (!in_zone[x]) {
      in_zone[x] = 1;
      zone.push_back(x);
    }
  };
  for (Index x : {removal.u, removal.v, u, v}) {
    mark(x);
    for (const Neighbor& nb : adj.neighbors(x)) mark(nb.node);
  }
  std::sort(zone.begin(), zone.end());
  const double before = adj.zone_loss(zone, in_zone, spec);
  adj.remove(removal.u, removal.v);
  adj.add(u, v, 1.0);
  const double after = adj.zone_loss(zone, in_zone, spec);
  adj.remove(u, v);
  adj.add(removal.u, removal.v, removal.w);
  return after - before;
}

WeightedGraph swapped(const WeightedGraph& g, const Edge& removal, Index u, Index v) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    if (e.u == removal.u && e.v == removal.v) continue;
    edges.push_back(e);
  }
  edges.push_back(Edge{u, v, 1.0});
  return build_graph(g.node_count(), edges);
}

struct RemovalCandidate {
  double kappa;
  Edge edge;
};

enum class RemovalRule { NegativeCurvature, BelowThreshold };

// Cycle edges eligible for removal, most negative curvature first.
std::vector<RemovalCandidate> removal_candidates(const WeightedGraph& g, RemovalRule rule, double k_target) {
  const std::vector<double> kappa = kernels::forman(g);
  const std::vector<Edge> bridge_list = bridges(g);
  std::vector<Edge> keep;
  if (rule == RemovalRule::BelowThreshold) keep = ricci_threshold_edges(g, k_target).keep;
  auto edge_less = [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; };

  std::vector<RemovalCandidate> out;
  auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (std::binary_search(bridge_list.begin(), bridge_list.end(), e, edge_less)) continue;
    if (rule == RemovalRule::NegativeCurvature && !(kappa[k] < 0.0)) continue;
    if (rule == RemovalRule::BelowThreshold && std::binary_search(keep.begin(), keep.end(), e, edge_less)) continue;
    out.push_back({kappa[k], e});
  }
  std::sort(out.begin(), out.end(), [](const RemovalCandidate& a, const RemovalCandidate& b) {
    if (a.kappa != b.kappa) return a.kappa < b.kappa;
    if (a.edge.u != b.edge.u) return a.edge.u < b.edge.u;
    return a.edge.v < b.edge.v;
  });
  return out;
}

SurgeryOutcome swap_surgery(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss, RemovalRule rule) {
  SurgeryOutcome out;
  const auto budget = static_cast<std::size_t>(std::ceil(cfg.delta * static_cast<double>(state.g.edge_count())));
  bool eligible = false;
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    const auto candidates = removal_candidates(state.g, rule, cfg.k_target);
    if (candidates.empty()) break;
    eligible = true;
    const Edge removal = candidates.front().edge;

    const std::vector<Index> labels = component_labels(state.g);
    const auto pool = kernels::nearest_pairs(state.g, state.s.values(), labels, cfg.pool);
    LocalAdjacency adj(state.g);
    bool committed = false;
    for (const PairCandidate& c : pool) {
      if (!move_preserves_betti(state.g, EdgeRef{removal.u, removal.v}, Edge{c.u, c.v, 1.0})) continue;
      const double delta = swap_delta(adj, state.g.node_count(), removal, c.u, c.v, loss.ricci);
      if (!(delta < 0.0)) continue;
      state.g = swapped(state.g, removal, c.u, c.v);
      ++out.swaps;
      committed = true;
      break;
    }
    // The next attempt would see the same graph and fail the same way.
    if (!committed) break;
  }
  if (out.swaps > 0) {
    out.status = SurgeryOutcome::Status::Applied;
  } else if (!eligible && rule == RemovalRule::NegativeCurvature) {
    out.status = SurgeryOutcome::Status::NoEligibleEdge;
  } else {
    out.status = SurgeryOutcome::Status::NotTriggered;
  }
  return out;
}

double step_size(const OnnState& state, const RunConfig& cfg) {
  if (cfg.eta_rule == EtaRule::Fixed) return cfg.eta;
  const double lmax = state.g.node_count() > 1 ? lambda_max_iterative(state.g) : 0.0;
  const double denom = lmax + cfg.loss.connection.norm(state.g);
  return denom > 0.0 ? 1.0 / denom : 1.0;
}

double lambda2_of(const WeightedGraph& g, const RunConfig& cfg) {
  SpectrumOptions opts;
  opts.method = cfg.spectral_method;
  return spectrum(g, LaplacianKind::Combinatorial, opts).lambda2;
}

void write_number(std::ostream& out, double x) {
  if (std::isnan(x)) {
    out << "nan";
  } else {
    out << format_double(x);
  }
}

}  // namespace

void validate(const SurgeryConfig& cfg) {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidParams, what); };
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) fail("surgery.p must lie in [0, 1]");
  if (!(cfg.theta >= 0.0)) fail("surgery.theta must be >= 0");
  if (cfg.mode == SurgeryMode::Decay) {
    if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) fail("surgery.delta must lie in [0, 1) in decay mode");
  } else {
    if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) fail("surgery.delta must lie in (0, 1] in swap modes");
  }
  if (cfg.mode == SurgeryMode::RicciFlow && !(cfg.k_target > 0.0)) fail("surgery.k_target must be > 0");
}

void semantic_step(OnnState& state, double eta, const ConnectionOperator& l1) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidParams, "step size must be positive");
  const StateMatrix grad = grad_s(state.s, state.g, l1);
  state.s.mutable_values() -= eta * grad;
  ++state.iter;
}

SurgeryOutcome surgery_decay(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss) {
  SurgeryOutcome out;
  if (cfg.delta == 0.0 || !(homology_loss(state.g, loss.betti_targets) > cfg.theta)) return out;
  std::vector<Edge> edges(state.g.edges().begin(), state.g.edges().end());
  for (Edge& e : edges) e.w *= 1.0 - cfg.delta;
  state.g = build_graph(state.g.node_count(), edges);
  out.status = SurgeryOutcome::Status::Applied;
  return out;
}

SurgeryOutcome surgery_rewire(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss) {
  return swap_surgery(state, cfg, loss, RemovalRule::NegativeCurvature);
}

SurgeryOutcome surgery_ricci_flow(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss) {
  return swap_surgery(state, cfg, loss, RemovalRule::BelowThreshold);
}

SurgeryOutcome apply_surgery(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss) {
  switch (cfg.mode) {
    case SurgeryMode::Decay:
      return surgery_decay(state, cfg, loss);
    case SurgeryMode::Rewire:
      return surgery_rewire(state, cfg, loss);
    case SurgeryMode::RicciFlow:
      return surgery_ricci_flow(state, cfg, loss);
  }
  return {};
}

std::vector<Edge> bridges(const WeightedGraph& g) {
  const Index n = g.node_count();
  constexpr Index kUnseen = static_cast<Index>(-1);
  std::vector<Index> disc(n, kUnseen), low(n, 0), parent(n, kUnseen), cursor(n, 0);
  std::vector<Edge> out;
  Index timer = 0;
  std::vector<Index> stack;
  for (Index root = 0; root < n; ++root) {
    if (disc[root] != kUnseen) continue;
    disc[root] = low[root] = timer++;
    stack.push_back(root);
    while (!stack.empty()) {
      const Index x = stack.back();
      auto nbrs = g.neighbors(x);
      if (cursor[x] < nbrs.size()) {
        const Index y = nbrs[cursor[x]++].node;
        if (disc[y] == kUnseen) {
          parent[y] = x;
          disc[y] = low[y] = timer++;
          stack.push_back(y);
        } else if (y != parent[x]) {
          low[x] = std::min(low[x], disc[y]);
        }
        continue;
      }
      stack.pop_back();
      const Index p = parent[x];
      if (p == kUnseen) continue;
      low[p] = std::min(low[p], low[x]);
      if (low[x] > disc[p]) out.push_back(Edge{std::min(p, x), std::max(p, x), g.weight(p, x)});
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  return out;
}

TrajectoryRecord run(OnnState state, const RunConfig& cfg, OnnState* final_state) {
  validate(cfg.surgery);
  if (cfg.eta_rule == EtaRule::Fixed && !(cfg.eta > 0.0)) throw Error(ErrorCode::InvalidParams, "run.eta must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t every = std::max<std::size_t>(1, cfg.spectral_every);

  TrajectoryRecord traj;
  traj.rows.reserve(cfg.iterations + 1);
  double eta = step_size(state, cfg);
  double lambda2 = lambda2_of(state.g, cfg);
  const BettiPair b0 = betti(state.g);
  BettiPair b = b0;
  double topo_sum = 0.0;
  double cons_sum = 0.0;

  auto push_row = [&](bool surgery, std::size_t swaps) {
    TrajectoryRow row;
    row.iter = state.iter;
    row.loss = total_loss(state.s, state.g, cfg.loss);
    row.beta0 = b.beta0;
    row.beta1 = b.beta1;
    row.edges = state.g.edge_count();
    row.lambda2 = lambda2;
    row.surgery = surgery;
    row.swaps = swaps;
    if (!traj.events.empty() && cons_sum > 0.0) row.xi_running = topo_sum / cons_sum;
    traj.rows.push_back(row);
  };
  push_row(false, 0);

  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    semantic_step(state, eta, cfg.loss.connection);
    bool surgery = false;
    std::size_t swaps = 0;
    if (state.coin.bernoulli(cfg.surgery.p)) {
      const TopologyLoss topo_before = topology_loss(state.g, cfg.loss);
      const double cons_before = consensus_loss(state.s, state.g);
      const SurgeryOutcome outcome = apply_surgery(state, cfg.surgery, cfg.loss);
      if (outcome.changed()) {
        surgery = true;
        swaps = outcome.swaps;
        SurgeryEvent ev;
        ev.iter = state.iter;
        ev.topo_before = topo_before.total();
        ev.topo_after = topology_loss(state.g, cfg.loss).total();
        ev.cons_before = cons_before;
        ev.cons_after = consensus_loss(state.s, state.g);
        topo_sum += ev.topo_before - ev.topo_after;
        cons_sum += std::abs(ev.cons_after - ev.cons_before);
        traj.events.push_back(ev);
        eta = step_size(state, cfg);
        b = betti(state.g);
      }
    }
    if ((k + 1) % every == 0 || (surgery && every == 1)) lambda2 = lambda2_of(state.g, cfg);
    push_row(surgery, swaps);
  }

  traj.summary.iterations = cfg.iterations;
  traj.summary.surgery_events = traj.events.size();
  if (cfg.iterations >= 2) {
    try {
      const RateFit fit = fit_rate(traj, cfg.fit_window);
      traj.summary.mu_emp = fit.mu_emp;
      traj.summary.r_squared = fit.r_squared;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonPositiveLoss) throw;
    }
  }
  traj.summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (final_state != nullptr) *final_state = std::move(state);
  return traj;
}

RateFit fit_exponential(std::span<const double> x, std::span<const double> v) {
  if (x.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "fit: x and v differ in length");
  if (x.size() < 2) throw Error(ErrorCode::InvalidParams, "fit: need at least two points");
  std::vector<double> y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw Error(ErrorCode::NonPositiveLoss, "fit: loss must be positive");
    y[i] = std::log(v[i]);
  }
  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidParams, "fit: x values are all equal");
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss_res += r * r;
  }
  RateFit fit;
  fit.mu_emp = slope == 0.0 ? 0.0 : -slope;
  fit.r_squared = (ss_res == 0.0 || syy == 0.0) ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

RateFit fit_rate(const TrajectoryRecord& traj, double window) {
  if (!(window > 0.0 && window <= 1.0)) throw Error(ErrorCode::InvalidParams, "fit window must lie in (0, 1]");
  const std::size_t total = traj.rows.size();
  const auto keep = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(window * static_cast<double>(total) - 1e-9)));
  if (total < 2) throw Error(ErrorCode::InvalidParams, "fit: need at least two rows");
  const std::size_t first = total - std::min(keep, total);
  std::vector<double> x, v;
  for (std::size_t i = first; i < total; ++i) {
    x.push_back(static_cast<double>(traj.rows[i].iter));
    v.push_back(traj.rows[i].loss.total);
  }
  return fit_exponential(x, v);
}

double surgery_efficiency(const TrajectoryRecord& traj) {
  if (traj.events.empty()) throw Error(ErrorCode::NoSurgeryEvents, "no surgery events recorded");
  double topo = 0.0, cons = 0.0;
  for (const SurgeryEvent& ev : traj.events) {
    topo += ev.topo_before - ev.topo_after;
    cons += std::abs(ev.cons_after - ev.cons_before);
  }
  const auto m = static_cast<double>(traj.events.size());
  if (cons == 0.0) throw Error(ErrorCode::ZeroDenominator, "surgery left the consensus loss unchanged");
  return (topo / m) / (cons / m);
}

bool roa_member(const WeightedGraph& g0, const BettiPair& targets) { return betti(g0) == targets; }

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& traj) {
  out << "iter,loss_total,loss_consensus,loss_ricci,loss_homology,beta0,beta1,lambda2,surgery,swaps,xi_running\n";
  for (const TrajectoryRow& r : traj.rows) {
    out << r.iter << ',';
    write_number(out, r.loss.total);
    out << ',';
    write_number(out, r.loss.consensus);
    out << ',';
    write_number(out, r.loss.ricci);
    out << ',';
    write_number(out, r.loss.homology);
    out << ',' << r.beta0 << ',' << r.beta1 << ',';
    write_number(out, r.lambda2);
    out << ',' << (r.surgery ? 1 : 0) << ',' << r.swaps << ',';
    write_number(out, r.xi_running);
    out << '\n';
  }
}

}  // namespace onn
