#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "onn/graph.hpp"
#include "onn/kernels.hpp"
#include "onn/loss.hpp"

namespace onn {

// 1 / (L sqrt(1 + 2 mu / L)). Errors: InvalidParams unless 0 < mu <= L.
double tau_max(double mu, double L);
// mu (1 - L tau / sqrt(2 mu / L)). Errors: InvalidParams.
double degraded_rate(double mu, double L, double tau);
// Delay at which degraded_rate reaches zero: sqrt(2 mu / L) / L.
double zero_rate_tau(double mu, double L);

enum class DisturbanceKind { None, Constant, Sinusoid, SeededUniform };

struct DelayConfig {
  double tau = 0.0;
  double dt = 1e-3;
  double horizon = 10.0;
  double disturbance_bound = 0.0;
  DisturbanceKind disturbance_kind = DisturbanceKind::None;
  double disturbance_omega = 1.0;  // sinusoid angular frequency
  std::uint64_t seed = 0;
  // Keep every n-th step in the log (the first and last step are always
  // kept); 0 keeps only those two.
  std::size_t record_every = 1;
  // Stop early once V falls below this fraction of V0 (0 disables).
  double settle_ratio = 0.0;
};

// Errors: InvalidParams.
void validate(const DelayConfig& cfg);

// Samples S(t_k), t_k = k dt, with linear interpolation for delayed reads
// and the constant initial history phi = S_0 on [-tau, 0].
class HistoryBuffer {
 public:
  HistoryBuffer(StateMatrix initial, double dt, double tau);

  void push(const StateMatrix& s);
  // S(t_now - tau) where t_now is the time of the latest sample.
  void delayed(StateMatrix& out) const;
  std::size_t steps() const noexcept { return steps_; }
  std::size_t capacity() const noexcept { return ring_.size(); }

 private:
  const StateMatrix& sample(std::size_t k) const { return ring_[k % ring_.size()]; }

  StateMatrix initial_;
  std::vector<StateMatrix> ring_;
  double lag_;  // tau / dt
  std::size_t steps_ = 0;  // index of the latest sample
};

// Right-hand side of the delayed flow dx/dt = -grad V(x(t - tau)) + w(t).
class DelaySystem {
 public:
  using Gradient = std::function<void(const StateMatrix&, StateMatrix&)>;
  using Value = std::function<double(const StateMatrix&)>;

  // Semantic flow on g: V = consensus + connection, grad = (L + 2 L1) S,
  // mu = lambda2(L), L = lambda_max(L) + 2 ||L1||.
  static DelaySystem consensus(const WeightedGraph& g, const ConnectionOperator& l1 = {});
  // dx/dt = -a x(t - tau), V = a x^2 / 2.
  static DelaySystem scalar(double a);

  void gradient(const StateMatrix& x, StateMatrix& out) const { gradient_(x, out); }
  double value(const StateMatrix& x) const { return value_(x); }
  // ||x - mean||_F for the consensus flow, |x| for the scalar one.
  double error(const StateMatrix& x) const { return error_(x); }
  double mu() const noexcept { return mu_; }
  double L() const noexcept { return L_; }

 private:
  Gradient gradient_;
  Value value_;
  Value error_;
  double mu_ = 0.0;
  double L_ = 0.0;
};

struct DelayedTrajectory {
  std::vector<double> t;
  std::vector<double> V;
  std::vector<double> consensus_error;
  std::vector<double> disturbance_norm;
  bool stable = true;
  bool short_horizon = false;  // horizon < 20 / mu
  double dt_used = 0.0;
  std::size_t steps = 0;
  double final_V = 0.0;
  double fitted_rate = 0.0;  // decay rate of V per second over the trailing 90%
  std::size_t razumikhin_checks = 0;
  std::size_t razumikhin_violations = 0;
};

// Explicit Euler with step min(dt, 0.1 / L, tau / 10). A run is unstable
// once V exceeds 1e6 V0 (or 1e6 when V0 = 0) or turns NaN; it is then
// truncated.
DelayedTrajectory dde_run(const DelaySystem& system, const StateMatrix& initial, const DelayConfig& cfg);
DelayedTrajectory dde_run(const SemanticState& initial, const WeightedGraph& g, const ConnectionOperator& l1,
                          const DelayConfig& cfg);

// Bisection on the stability verdict over [tau_lo, tau_hi]. Errors:
// NoBracket unless stable at tau_lo and unstable at tau_hi.
double find_tau_star(const DelaySystem& system, const StateMatrix& initial, double tau_lo, double tau_hi,
                     double tol, const DelayConfig& base);

struct IssResult {
  double steady_error = 0.0;  // max consensus error over the final 10% of the horizon
  double bound = 0.0;         // W / degraded_rate
  double mu_tilde = 0.0;
  bool short_horizon = false;
};

// Errors: InvalidParams (tau >= tau_max), Divergence.
IssResult iss_run(const DelaySystem& system, const StateMatrix& initial, const DelayConfig& cfg);

// CSV `t,V,consensus_error,disturbance_norm`.
void write_delayed_csv(std::ostream& out, const DelayedTrajectory& traj);

}  // namespace onn
