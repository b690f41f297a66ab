#include "onn/delay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include "onn/dynamics.hpp"
#include "onn/error.hpp"
#include "onn/rng.hpp"
#include "onn/spectrum.hpp"

namespace onn {

namespace {

void check_rate_params(double mu, double L) {
  if (!(mu > 0.0) || !(L > 0.0) || !(mu <= L) || !std::isfinite(L)) {
    throw Error(ErrorCode::InvalidParams, "delay formulas need 0 < mu <= L");
  }
}

double effective_dt(const DelaySystem& system, const DelayConfig& cfg) {
  double dt = cfg.dt;
  if (system.L() > 0.0) dt = std::min(dt, 0.1 / system.L());
  if (cfg.tau > 0.0) dt = std::min(dt, cfg.tau / 10.0);
  return dt;
}

class Disturbance {
 public:
  Disturbance(const DelayConfig& cfg, Eigen::Index rows, Eigen::Index cols)
      : cfg_(cfg), rng_(cfg.seed, streams::kDisturbance), direction_(StateMatrix::Zero(rows, cols)) {
    if (cfg.disturbance_kind == DisturbanceKind::Constant || cfg.disturbance_kind == DisturbanceKind::Sinusoid) {
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) direction_(i, j) = rng_.normal();
      const double norm = direction_.norm();
      if (norm > 0.0) direction_ /= norm;
    }
  }

  bool active() const { return cfg_.disturbance_kind != DisturbanceKind::None && cfg_.disturbance_bound > 0.0; }

  // Fills w(t); ||w||_F <= W.
  void at(double t, StateMatrix& w) {
    const double W = cfg_.disturbance_bound;
    switch (cfg_.disturbance_kind) {
      case DisturbanceKind::None:
        w.setZero(direction_.rows(), direction_.cols());
        break;
      case DisturbanceKind::Constant:
        w = W * direction_;
        break;
      case DisturbanceKind::Sinusoid:
        w = (W * std::sin(cfg_.disturbance_omega * t)) * direction_;
        break;
      case DisturbanceKind::SeededUniform: {
        w.resize(direction_.rows(), direction_.cols());
        const double scale = W / std::sqrt(static_cast<double>(w.size()));
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * rng_.uniform(-1.0, 1.0);
        break;
      }
    }
  }

 private:
  DelayConfig cfg_;
  CounterRng rng_;
  StateMatrix direction_;
};

double disagreement(const StateMatrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return (x.rowwise() - mean).norm();
}

}  // namespace

double tau_max(double mu, double L) {
  check_rate_params(mu, L);
  return 1.0 / (L * std::sqrt(1.0 + 2.0 * mu / L));
}

double degraded_rate(double mu, double L, double tau) {
  check_rate_params(mu, L);
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidParams, "tau must be >= 0");
  return mu * (1.0 - L * tau / std::sqrt(2.0 * mu / L));
}

double zero_rate_tau(double mu, double L) {
  check_rate_params(mu, L);
  return std::sqrt(2.0 * mu / L) / L;
}

void validate(const DelayConfig& cfg) {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidParams, what); };
  if (!(cfg.tau >= 0.0) || !std::isfinite(cfg.tau)) fail("delay.tau must be >= 0");
  if (!(cfg.dt > 0.0)) fail("delay.dt must be > 0");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) fail("delay.horizon must be > 0");
  if (!(cfg.disturbance_bound >= 0.0)) fail("delay.disturbance_bound must be >= 0");
  if (!(cfg.settle_ratio >= 0.0 && cfg.settle_ratio < 1.0)) fail("delay.settle_ratio must lie in [0, 1)");
}

HistoryBuffer::HistoryBuffer(StateMatrix initial, double dt, double tau) : initial_(std::move(initial)), lag_(tau / dt) {
  const auto cap = static_cast<std::size_t>(std::ceil(lag_)) + 2;
  ring_.assign(cap, initial_);
}

void HistoryBuffer::push(const StateMatrix& s) {
  ++steps_;
  ring_[steps_ % ring_.size()] = s;
}

void HistoryBuffer::delayed(StateMatrix& out) const {
  const double pos = static_cast<double>(steps_) - lag_;
  if (pos <= 0.0) {
    out = initial_;
    return;
  }
  const double base = std::floor(pos);
  const double frac = pos - base;
  const auto j = static_cast<std::size_t>(base);
  if (frac == 0.0 || j >= steps_) {
    out = sample(std::min(j, steps_));
    return;
  }
  out = (1.0 - frac) * sample(j) + frac * sample(j + 1);
}

DelaySystem DelaySystem::consensus(const WeightedGraph& g, const ConnectionOperator& l1) {
  DelaySystem sys;
  sys.gradient_ = [g, l1](const StateMatrix& x, StateMatrix& out) { out = grad_s(SemanticState(x), g, l1); };
  sys.value_ = [g, l1](const StateMatrix& x) {
    const SemanticState s(x);
    double v = consensus_loss(s, g);
    if (!l1.is_zero()) v += connection_loss(s, l1, g);
    return v;
  };
  sys.error_ = [](const StateMatrix& x) { return disagreement(x); };
  if (g.node_count() > 1) {
    const Spectrum sp = spectrum(g);
    sys.mu_ = sp.lambda2;
    sys.L_ = sp.lambda_max + 2.0 * l1.norm(g);
  }
  return sys;
}

DelaySystem DelaySystem::scalar(double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidParams, "scalar delay system needs a > 0");
  DelaySystem sys;
  sys.gradient_ = [a](const StateMatrix& x, StateMatrix& out) { out = a * x; };
  sys.value_ = [a](const StateMatrix& x) { return 0.5 * a * x.squaredNorm(); };
  sys.error_ = [](const StateMatrix& x) { return x.norm(); };
  sys.mu_ = a;
  sys.L_ = a;
  return sys;
}

DelayedTrajectory dde_run(const DelaySystem& system, const StateMatrix& initial, const DelayConfig& cfg) {
  validate(cfg);
  DelayedTrajectory traj;
  const double dt = effective_dt(system, cfg);
  traj.dt_used = dt;
  traj.short_horizon = system.mu() > 0.0 && cfg.horizon < 20.0 / system.mu();
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon / dt - 1e-9));
  const auto window = static_cast<std::size_t>(std::ceil(cfg.tau / dt - 1e-9));

  StateMatrix x = initial;
  StateMatrix xd, grad, w = StateMatrix::Zero(x.rows(), x.cols());
  HistoryBuffer hist(initial, dt, cfg.tau);
  Disturbance disturbance(cfg, x.rows(), x.cols());
  const double v0 = system.value(x);
  const double ref = v0 > 0.0 ? v0 : 1.0;
  double v = v0;
  double w_norm = 0.0;
  // Sliding maximum of V over the last `window` steps.
  std::deque<std::pair<std::size_t, double>> vmax;

  auto record = [&](std::size_t k) {
    traj.t.push_back(static_cast<double>(k) * dt);
    traj.V.push_back(v);
    traj.consensus_error.push_back(system.error(x));
    traj.disturbance_norm.push_back(w_norm);
  };

  std::size_t k = 0;
  for (; k < steps; ++k) {
    while (!vmax.empty() && vmax.back().second <= v) vmax.pop_back();
    vmax.emplace_back(k, v);
    while (vmax.front().first + window < k) vmax.pop_front();
    const bool razumikhin = v >= vmax.front().second;

    if (disturbance.active()) {
      disturbance.at(static_cast<double>(k) * dt, w);
      w_norm = w.norm();
    }
    if (k == 0 || (cfg.record_every > 0 && k % cfg.record_every == 0)) record(k);

    hist.delayed(xd);
    system.gradient(xd, grad);
    x -= dt * grad;
    if (disturbance.active()) x += dt * w;
    hist.push(x);
    const double v_next = system.value(x);

    if (razumikhin) {
      ++traj.razumikhin_checks;
      if (v_next - v > 1e-12 * std::max(1.0, v)) ++traj.razumikhin_violations;
    }
    v = v_next;
    if (!std::isfinite(v) || v > 1e6 * ref) {
      traj.stable = false;
      ++k;
      break;
    }
    if (cfg.settle_ratio > 0.0 && v < cfg.settle_ratio * ref) {
      ++k;
      break;
    }
  }
  traj.steps = k;
  traj.final_V = v;
  record(k);

  if (traj.stable && traj.V.size() >= 3) {
    const std::size_t first = traj.V.size() / 10;
    try {
      traj.fitted_rate = fit_exponential(std::span(traj.t).subspan(first), std::span(traj.V).subspan(first)).mu_emp;
    } catch (const Error&) {
      traj.fitted_rate = 0.0;
    }
  }
  return traj;
}

DelayedTrajectory dde_run(const SemanticState& initial, const WeightedGraph& g, const ConnectionOperator& l1,
                          const DelayConfig& cfg) {
  return dde_run(DelaySystem::consensus(g, l1), initial.values(), cfg);
}

double find_tau_star(const DelaySystem& system, const StateMatrix& initial, double tau_lo, double tau_hi,
                     double tol, const DelayConfig& base) {
  if (!(tau_lo >= 0.0 && tau_hi > tau_lo && tol > 0.0)) throw Error(ErrorCode::InvalidParams, "bad bisection range");
  DelayConfig cfg = base;
  cfg.record_every = 0;
  auto stable_at = [&](double tau) {
    cfg.tau = tau;
    return dde_run(system, initial, cfg).stable;
  };
  if (!stable_at(tau_lo) || stable_at(tau_hi)) {
    throw Error(ErrorCode::NoBracket, "stability verdict does not change over the tau range");
  }
  double lo = tau_lo, hi = tau_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (stable_at(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

IssResult iss_run(const DelaySystem& system, const StateMatrix& initial, const DelayConfig& cfg) {
  IssResult res;
  const double limit = tau_max(system.mu(), system.L());
  if (!(cfg.tau < limit)) throw Error(ErrorCode::InvalidParams, "iss_run needs tau < tau_max");
  const DelayedTrajectory traj = dde_run(system, initial, cfg);
  if (!traj.stable) throw Error(ErrorCode::Divergence, "delayed run diverged");
  res.mu_tilde = degraded_rate(system.mu(), system.L(), cfg.tau);
  res.bound = cfg.disturbance_bound / res.mu_tilde;
  res.short_horizon = traj.short_horizon;
  const double t_end = traj.t.back();
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (traj.t[i] >= 0.9 * t_end) res.steady_error = std::max(res.steady_error, traj.consensus_error[i]);
  }
  return res;
}

void write_delayed_csv(std::ostream& out, const DelayedTrajectory& traj) {
  out << "t,V,consensus_error,disturbance_norm\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    out << format_double(traj.t[i]) << ',' << format_double(traj.V[i]) << ',' << format_double(traj.consensus_error[i])
        << ',' << format_double(traj.disturbance_norm[i]) << '\n';
  }
}

}  // namespace onn
