#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "onn/graph.hpp"
#include "onn/homology.hpp"
#include "onn/loss.hpp"
#include "onn/rng.hpp"
#include "onn/spectrum.hpp"

namespace onn {

// Hybrid state (S, A) plus the iteration counter and the surgery coin.
struct OnnState {
  SemanticState s;
  WeightedGraph g;
  std::uint64_t iter = 0;
  CounterRng coin{0, streams::kSurgeryCoin};

  OnnState(SemanticState s_, WeightedGraph g_, std::uint64_t seed)
      : s(std::move(s_)), g(std::move(g_)), coin(seed, streams::kSurgeryCoin) {}
};

enum class SurgeryMode { Decay, Rewire, RicciFlow };

struct SurgeryConfig {
  SurgeryMode mode = SurgeryMode::Rewire;
  double p = 0.0;         // application probability per iteration
  double delta = 0.05;    // decay factor (Decay) or swap fraction of E (Rewire, RicciFlow)
  double theta = 0.0;     // cycle-loss trigger (Decay)
  double k_target = 2.0;  // degree target (RicciFlow)
  std::size_t pool = 32;  // nearest-pair candidates for additions
};

// Errors: InvalidParams for out-of-range fields.
void validate(const SurgeryConfig& cfg);

struct SurgeryOutcome {
  enum class Status { Applied, NotTriggered, NoEligibleEdge };
  Status status = Status::NotTriggered;
  std::size_t swaps = 0;

  bool changed() const { return status == Status::Applied; }
};

// s <- s - eta * grad_s(s, g, l1); g unchanged; iter advances.
void semantic_step(OnnState& state, double eta, const ConnectionOperator& l1 = {});

// Scales every weight by (1 - delta) when homology_loss > theta.
SurgeryOutcome surgery_decay(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss);

// Up to ceil(delta * E) swaps. Each swap removes the most negative-curvature
// cycle edge and adds the first unit-weight edge among the `pool` nearest
// non-adjacent same-component pairs that passes move_preserves_betti and
// strictly lowers the ricci loss. Returns NoEligibleEdge (state unchanged)
// when no swap commits because no cycle edge has negative curvature.
SurgeryOutcome surgery_rewire(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss);

// Same swap machinery with removals drawn from the cycle edges that the
// curvature threshold rule for k_target would drop.
SurgeryOutcome surgery_ricci_flow(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss);

SurgeryOutcome apply_surgery(OnnState& state, const SurgeryConfig& cfg, const LossConfig& loss);

// Bridges of g (edges on no cycle), canonical (u, v) order.
std::vector<Edge> bridges(const WeightedGraph& g);

enum class EtaRule { Fixed, Auto };

struct RunConfig {
  std::size_t iterations = 0;
  EtaRule eta_rule = EtaRule::Auto;
  double eta = 0.0;  // used when eta_rule == Fixed
  std::size_t spectral_every = 25;
  SpectrumMethod spectral_method = SpectrumMethod::Auto;
  double fit_window = 0.9;
  SurgeryConfig surgery{};
  LossConfig loss{};
};

struct TrajectoryRow {
  std::uint64_t iter = 0;
  LossBreakdown loss{};
  Index beta0 = 0;
  Index beta1 = 0;
  Index edges = 0;
  double lambda2 = 0.0;
  bool surgery = false;
  std::size_t swaps = 0;
  double xi_running = std::numeric_limits<double>::quiet_NaN();
};

// Topology and consensus loss right before and after one state-changing
// surgery call, at fixed S.
struct SurgeryEvent {
  std::uint64_t iter = 0;
  double topo_before = 0.0;
  double topo_after = 0.0;
  double cons_before = 0.0;
  double cons_after = 0.0;
};

struct TrajectorySummary {
  double mu_emp = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  std::size_t surgery_events = 0;
  double wall_seconds = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  std::vector<SurgeryEvent> events;
  TrajectorySummary summary;
};

// K iterations of semantic_step followed, with probability p (one coin draw
// per iteration), by one surgery call. Auto step size is 1/(L + ||L1||)
// with L recomputed after every state-changing surgery.
TrajectoryRecord run(OnnState initial, const RunConfig& cfg, OnnState* final_state = nullptr);

struct RateFit {
  double mu_emp = 0.0;  // negative slope of ln V per unit of x
  double r_squared = 1.0;
};

// Least squares of ln v against x. Errors: NonPositiveLoss.
RateFit fit_exponential(std::span<const double> x, std::span<const double> v);
// Fit over the trailing `window` fraction of the rows.
RateFit fit_rate(const TrajectoryRecord& traj, double window = 0.9);

// mean(topology improvement) / mean(|consensus change|) over surgery
// events. Errors: NoSurgeryEvents, ZeroDenominator.
double surgery_efficiency(const TrajectoryRecord& traj);

// Homology membership test for the topological basin.
bool roa_member(const WeightedGraph& g0, const BettiPair& targets);

// CSV with header
// iter,loss_total,loss_consensus,loss_ricci,loss_homology,beta0,beta1,lambda2,surgery,swaps,xi_running
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& traj);

}  // namespace onn
