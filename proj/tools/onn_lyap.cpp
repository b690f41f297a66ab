#include <CLI11.hpp>

#include "onn/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-certified ONN dynamics: runs, sweeps, certificates, persistence, limits"};
  app.require_subcommand(1);
  onn::CliOptions opts;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opts.config, "experiment config (JSON, schema onn-lyap/1)");
    if (config_required) c->required();
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--threads", opts.threads, "OpenMP threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opts.quiet, "suppress console output");
  };

  auto* run = app.add_subcommand("run", "run one trajectory");
  common(run, true);
  auto* sweep = app.add_subcommand("sweep", "sweep p, k or tau over trials");
  common(sweep, true);
  auto* certify = app.add_subcommand("certify", "Lyapunov certificate, delay margin and limits for a target graph");
  common(certify, true);
  auto* persistence = app.add_subcommand("persistence", "persistence diagram of an edge-list graph");
  common(persistence, false);
  persistence->add_option("graph", opts.graph, "edge-list file (onn-graph v1)")->required();
  auto* limits = app.add_subcommand("limits", "measured quantities against closed-form limits");
  common(limits, false);
  limits->add_option("--graph", opts.graph, "edge-list file instead of the configured generator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return onn::cmd_run(opts);
  if (*sweep) return onn::cmd_sweep(opts);
  if (*certify) return onn::cmd_certify(opts);
  if (*persistence) return onn::cmd_persistence(opts);
  if (*limits) return onn::cmd_limits(opts);
  return 2;
}
