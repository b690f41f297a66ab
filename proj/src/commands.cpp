#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "onn/error.hpp"
#include "onn/experiment.hpp"
#include "onn/homology.hpp"
#include "onn/spectrum.hpp"

namespace onn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TrialOutcome {
  double mu = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double final_loss = 0.0;
  bool betti_stable = true;
  double xi = std::numeric_limits<double>::quiet_NaN();
  bool stable = true;
  double rate = 0.0;
  double tau_max = 0.0;
  double degraded = 0.0;
};

ExperimentConfig point_config(const ExperimentConfig& cfg, double value) {
  ExperimentConfig c = cfg;
  switch (cfg.sweep->axis) {
    case SweepSpec::Axis::P:
      c.surgery.p = value;
      break;
    case SweepSpec::Axis::K:
      c.generator.k = static_cast<Index>(value);
      c.surgery.k_target = value;
      break;
    case SweepSpec::Axis::Tau:
      c.delay->tau = value;
      break;
  }
  c.run.config.surgery = c.surgery;
  return c;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t trial) {
  TrialOutcome out;
  if (cfg.sweep->axis == SweepSpec::Axis::Tau) {
    const WeightedGraph g = trial_graph(cfg, trial);
    const DelaySystem system = DelaySystem::consensus(g, cfg.loss.connection);
    DelayConfig d = *cfg.delay;
    d.seed += trial;
    d.record_every = std::max<std::size_t>(d.record_every, 1);
    const DelayedTrajectory traj = dde_run(system, trial_state(cfg, trial).values(), d);
    out.stable = traj.stable;
    out.rate = traj.stable ? traj.fitted_rate : std::numeric_limits<double>::quiet_NaN();
    out.tau_max = tau_max(system.mu(), system.L());
    out.degraded = degraded_rate(system.mu(), system.L(), d.tau);
    return out;
  }
  const ExperimentRun r = run_experiment(cfg, trial);
  out.mu = r.trajectory.summary.mu_emp;
  out.r2 = r.trajectory.summary.r_squared;
  out.final_loss = r.trajectory.rows.back().loss.total;
  const TrajectoryRow& first = r.trajectory.rows.front();
  for (const TrajectoryRow& row : r.trajectory.rows) {
    out.betti_stable = out.betti_stable && row.beta0 == first.beta0 && row.beta1 == first.beta1;
  }
  try {
    out.xi = surgery_efficiency(r.trajectory);
  } catch (const Error&) {
  }
  return out;
}

void mean_std(const std::vector<double>& xs, double& mean, double& std) {
  mean = 0.0;
  std = 0.0;
  if (xs.empty()) {
    mean = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  for (double x : xs) std += (x - mean) * (x - mean);
  std = std::sqrt(std / static_cast<double>(xs.size() - 1));
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string csv_number(double x) { return std::isnan(x) ? "nan" : format_double(x); }

fs::path prepare_dir(const CliOptions& opts, const std::string& name) {
  const fs::path dir = opts.out / name;
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::FileFormat, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void write_timing(const fs::path& dir, const std::string& command, double seconds) {
  std::ofstream out(dir / "timing.log", std::ios::app);
  out << command << " wall_seconds=" << std::setprecision(6) << seconds << '\n';
}

ExperimentConfig load_for_cli(const CliOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config);
  apply_seed_override(cfg);
  return cfg;
}

// Shared exit-code mapping for all subcommands.
template <typename Body>
int guarded(const char* command, Body body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    std::cerr << "onn_lyap " << command << ": " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigParse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "onn_lyap " << command << ": " << e.what() << '\n';
    return 1;
  }
}

WeightedGraph certify_target(const ExperimentConfig& cfg) {
  if (cfg.certify.graph) return load_graph(*cfg.certify.graph);
  return trial_graph(cfg, 0);
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, int threads) {
  if (!cfg.sweep) throw Error(ErrorCode::ConfigParse, "config has no 'sweep' section");
  if (cfg.sweep->axis == SweepSpec::Axis::Tau && !cfg.delay) {
    throw Error(ErrorCode::ConfigParse, "a tau sweep needs a 'delay' section");
  }
  const SweepSpec& sw = *cfg.sweep;
  const std::size_t trials = sw.trials;
  const std::size_t jobs = sw.values.size() * trials;
  std::vector<TrialOutcome> outcomes(jobs);
  std::vector<std::string> failures(jobs);

  // Kernels stay serial inside the job-level parallel loop.
  const int kernel_threads = onn::threads();
  if (threads > 1) set_threads(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs); ++j) {
    const auto job = static_cast<std::size_t>(j);
    try {
      outcomes[job] = run_trial(point_config(cfg, sw.values[job / trials]), job % trials);
    } catch (const std::exception& e) {
      failures[job] = e.what();
    }
  }
  set_threads(kernel_threads);
  for (std::size_t job = 0; job < jobs; ++job) {
    if (!failures[job].empty()) {
      throw Error(ErrorCode::InvalidParams, "sweep point " + format_double(sw.values[job / trials]) + " trial " +
                                                std::to_string(job % trials) + ": " + failures[job]);
    }
  }

  SweepResult result;
  result.axis = sw.axis;
  for (std::size_t v = 0; v < sw.values.size(); ++v) {
    SweepRow row;
    row.value = sw.values[v];
    row.trials = trials;
    std::vector<double> mus, r2s, losses, xis, rates;
    std::size_t stable = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialOutcome& o = outcomes[v * trials + t];
      if (!std::isnan(o.mu)) mus.push_back(o.mu);
      if (!std::isnan(o.r2)) r2s.push_back(o.r2);
      losses.push_back(o.final_loss);
      if (!std::isnan(o.xi)) xis.push_back(o.xi);
      row.betti_stable = row.betti_stable && o.betti_stable;
      if (o.stable) {
        ++stable;
        rates.push_back(o.rate);
      }
      row.tau_max = o.tau_max;
      row.degraded_rate = o.degraded;
    }
    double unused = 0.0;
    mean_std(mus, row.mu_mean, row.mu_std);
    mean_std(r2s, row.r2_mean, unused);
    mean_std(losses, row.final_loss_mean, unused);
    mean_std(xis, row.xi_mean, unused);
    mean_std(rates, row.rate_mean, row.rate_std);
    row.stable_fraction = static_cast<double>(stable) / static_cast<double>(trials);
    result.rows.push_back(row);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const std::string axis = to_string(result.axis);
  if (result.axis == SweepSpec::Axis::Tau) {
    out << "axis,value,trials,stable_fraction,fitted_rate_mean,fitted_rate_std,tau_max,degraded_rate\n";
    for (const SweepRow& r : result.rows) {
      out << axis << ',' << csv_number(r.value) << ',' << r.trials << ',' << csv_number(r.stable_fraction) << ','
          << csv_number(r.rate_mean) << ',' << csv_number(r.rate_std) << ',' << csv_number(r.tau_max) << ','
          << csv_number(r.degraded_rate) << '\n';
    }
    return;
  }
  out << "axis,value,trials,mu_emp_mean,mu_emp_std,r_squared_mean,final_loss_mean,betti_stable,xi_mean\n";
  for (const SweepRow& r : result.rows) {
    out << axis << ',' << csv_number(r.value) << ',' << r.trials << ',' << csv_number(r.mu_mean) << ','
        << csv_number(r.mu_std) << ',' << csv_number(r.r2_mean) << ',' << csv_number(r.final_loss_mean) << ','
        << (r.betti_stable ? 1 : 0) << ',' << csv_number(r.xi_mean) << '\n';
  }
}

json sweep_json(const SweepResult& result) {
  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    if (result.axis == SweepSpec::Axis::Tau) {
      rows.push_back({{"tau", r.value},
                      {"trials", r.trials},
                      {"stable", r.stable_fraction == 1.0},
                      {"stable_fraction", r.stable_fraction},
                      {"fitted_rate", finite_or_null(r.rate_mean)},
                      {"fitted_rate_std", finite_or_null(r.rate_std)},
                      {"tau_max", finite_or_null(r.tau_max)},
                      {"degraded_rate", finite_or_null(r.degraded_rate)}});
    } else {
      rows.push_back({{"value", r.value},
                      {"trials", r.trials},
                      {"mu_emp_mean", finite_or_null(r.mu_mean)},
                      {"mu_emp_std", finite_or_null(r.mu_std)},
                      {"r_squared_mean", finite_or_null(r.r2_mean)},
                      {"final_loss_mean", finite_or_null(r.final_loss_mean)},
                      {"betti_stable", r.betti_stable},
                      {"xi_mean", finite_or_null(r.xi_mean)}});
    }
  }
  return {{"schema", kConfigSchema}, {"axis", to_string(result.axis)}, {"rows", rows}};
}

json certify_json(const ExperimentConfig& cfg) {
  const WeightedGraph target = certify_target(cfg);
  LossConfig loss = cfg.loss;
  if (cfg.auto_betti_targets) loss.betti_targets = betti(target);
  const LyapunovCertificate cert = certificate(target, loss, cfg.certify.samples, cfg.certify.radius, cfg.run.seed);
  const double mu = cert.mu;
  const double L = cert.L + 2.0 * cert.connection_norm;
  json j;
  j["schema"] = kConfigSchema;
  j["certificate"] = {{"mu", cert.mu},
                      {"L", cert.L},
                      {"c_topo", cert.c_topo},
                      {"connection_norm", cert.connection_norm},
                      {"gershgorin_bound", cert.gershgorin_bound},
                      {"samples", cert.samples},
                      {"radius", cert.radius},
                      {"alpha1_at_radius", cert.alpha1(cert.radius)},
                      {"alpha2_at_radius", cert.alpha2(cert.radius)}};
  j["tau_max"] = tau_max(mu, L);
  j["zero_rate_tau"] = zero_rate_tau(mu, L);
  json rates = json::array();
  for (double tau : cfg.certify.taus) rates.push_back({{"tau", tau}, {"mu_tilde", degraded_rate(mu, L, tau)}});
  j["degraded_rates"] = rates;
  LimitInputs in = cfg.limits;
  if (!cfg.limits_dim_set) in.dim = cfg.state.d;
  j["limits"] = limits_json(limit_report(target, in));
  return j;
}

json limits_json(const LimitReport& r) {
  return {{"n", r.n},
          {"edges", r.edges},
          {"diameter", r.diameter},
          {"beta0", r.beta0},
          {"beta1", r.beta1},
          {"lambda2", r.lambda2},
          {"spectral_lower", r.spectral_lower},
          {"info_iterations", finite_or_null(r.info_iterations)},
          {"min_edges", r.min_edges},
          {"laman_edges", r.laman_edges},
          {"rigidity", to_string(r.rigidity)},
          {"mean_degree", r.mean_degree},
          {"oracle_sparse_flops", r.oracle_sparse_flops},
          {"oracle_dense_flops", r.oracle_dense_flops}};
}

int cmd_run(const CliOptions& opts) {
  return guarded("run", [&] {
    const auto start = std::chrono::steady_clock::now();
    set_threads(opts.threads);
    const ExperimentConfig cfg = load_for_cli(opts);
    const ExperimentRun r = run_experiment(cfg);
    const fs::path dir = prepare_dir(opts, cfg.name);
    {
      std::ofstream out(dir / "trajectory.csv");
      write_trajectory_csv(out, r.trajectory);
    }
    const json summary = run_summary(cfg, r);
    write_json(dir / "summary.json", summary);
    write_json(dir / "config.echo.json", echo_config(cfg));
    write_timing(dir, "run", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (!opts.quiet) {
      std::cout << "run " << cfg.name << ": " << r.trajectory.rows.size() << " rows, mu_emp="
                << summary["mu_emp"].dump() << ", betti_stable=" << summary["betti_stable"].dump() << ", events="
                << r.trajectory.events.size() << "\n  wrote " << (dir / "trajectory.csv").string() << '\n';
    }
  });
}

int cmd_sweep(const CliOptions& opts) {
  return guarded("sweep", [&] {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_for_cli(opts);
    if (!cfg.sweep) throw Error(ErrorCode::ConfigParse, "missing key 'sweep'");
    const SweepResult result = run_sweep(cfg, opts.threads);
    const fs::path dir = prepare_dir(opts, cfg.name);
    {
      std::ofstream out(dir / "sweep.csv");
      write_sweep_csv(out, result);
    }
    write_json(dir / "sweep.json", sweep_json(result));
    write_json(dir / "config.echo.json", echo_config(cfg));
    write_timing(dir, "sweep", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (!opts.quiet) {
      write_sweep_csv(std::cout, result);
      std::cout << "  wrote " << (dir / "sweep.csv").string() << '\n';
    }
  });
}

int cmd_certify(const CliOptions& opts) {
  return guarded("certify", [&] {
    set_threads(opts.threads);
    const ExperimentConfig cfg = load_for_cli(opts);
    const json j = certify_json(cfg);
    const fs::path dir = prepare_dir(opts, cfg.name);
    write_json(dir / "certificate.json", j);
    write_json(dir / "config.echo.json", echo_config(cfg));
    if (!opts.quiet) {
      const json& c = j["certificate"];
      std::cout << "mu=" << c["mu"].dump() << " L=" << c["L"].dump() << " c_topo=" << c["c_topo"].dump()
                << " tau_max=" << j["tau_max"].dump() << '\n';
      for (const json& r : j["degraded_rates"]) std::cout << "  tau=" << r["tau"].dump() << " mu_tilde=" << r["mu_tilde"].dump() << '\n';
      std::cout << "  wrote " << (dir / "certificate.json").string() << '\n';
    }
  });
}

int cmd_persistence(const CliOptions& opts) {
  return guarded("persistence", [&] {
    const WeightedGraph g = load_graph(opts.graph.string());
    const PersistenceDiagram pd = persistence(g);
    const BettiPair b = betti(g);
    const fs::path dir = prepare_dir(opts, opts.graph.stem().string());
    {
      std::ofstream out(dir / "diagram.csv");
      write_diagram_csv(out, pd);
    }
    std::size_t essential0 = 0, essential1 = 0;
    for (const auto& p : pd.dim0) essential0 += p.essential() ? 1 : 0;
    for (const auto& p : pd.dim1) essential1 += p.essential() ? 1 : 0;
    write_json(dir / "betti.json", {{"schema", kConfigSchema},
                                    {"n", g.node_count()},
                                    {"edges", g.edge_count()},
                                    {"beta0", b.beta0},
                                    {"beta1", b.beta1},
                                    {"dim0_pairs", pd.dim0.size()},
                                    {"dim1_pairs", pd.dim1.size()},
                                    {"dim0_essential", essential0},
                                    {"dim1_essential", essential1}});
    if (!opts.quiet) {
      std::cout << "beta0=" << b.beta0 << " beta1=" << b.beta1 << "\n  wrote " << (dir / "diagram.csv").string() << '\n';
    }
  });
}

int cmd_limits(const CliOptions& opts) {
  return guarded("limits", [&] {
    WeightedGraph g;
    LimitInputs in;
    std::string name = "limits";
    if (!opts.config.empty()) {
      const ExperimentConfig cfg = load_for_cli(opts);
      in = cfg.limits;
      if (!cfg.limits_dim_set) in.dim = cfg.state.d;
      g = opts.graph.empty() ? trial_graph(cfg, 0) : load_graph(opts.graph.string());
      name = cfg.name;
    } else if (!opts.graph.empty()) {
      g = load_graph(opts.graph.string());
      name = opts.graph.stem().string();
    } else {
      throw Error(ErrorCode::ConfigParse, "limits needs --config or --graph");
    }
    const LimitReport r = limit_report(g, in);
    const fs::path dir = prepare_dir(opts, name);
    json j = limits_json(r);
    j["schema"] = kConfigSchema;
    write_json(dir / "limits.json", j);
    if (!opts.quiet) {
      std::cout << std::left << std::setw(22) << "quantity" << std::setw(16) << "measured" << "bound\n";
      std::cout << std::setw(22) << "lambda2" << std::setw(16) << r.lambda2 << ">= " << r.spectral_lower << '\n';
      std::cout << std::setw(22) << "edges" << std::setw(16) << r.edges << ">= " << r.min_edges << " (homology)\n";
      std::cout << std::setw(22) << "edges vs laman" << std::setw(16) << r.edges << "laman " << r.laman_edges << " ("
                << to_string(r.rigidity) << ")\n";
      std::cout << std::setw(22) << "info_iterations" << std::setw(16) << "-" << r.info_iterations << '\n';
      std::cout << std::setw(22) << "oracle flops" << std::setw(16) << r.oracle_sparse_flops << r.oracle_dense_flops
                << " (dense)\n";
      std::cout << "  wrote " << (dir / "limits.json").string() << '\n';
    }
  });
}

}  // namespace onn
