#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "onn/bounds.hpp"
#include "onn/delay.hpp"
#include "onn/dynamics.hpp"
#include "onn/generators.hpp"
#include "onn/loss.hpp"

namespace onn {

inline constexpr const char* kConfigSchema = "onn-lyap/1";

struct StateSpec {
  Index d = 4;
  InitLaw law = InitLaw::Gaussian;
  std::optional<std::uint64_t> seed;  // defaults to run.seed
};

struct RunSpec {
  RunConfig config{};
  std::uint64_t seed = 0;
};

struct CertifySpec {
  std::size_t samples = 64;
  double radius = 1.0;
  std::vector<double> taus;
  std::optional<std::string> graph;  // edge-list file; the generator otherwise
};

struct SweepSpec {
  enum class Axis { P, K, Tau };
  Axis axis = Axis::P;
  std::vector<double> values;
  std::size_t trials = 1;
};

std::string to_string(SweepSpec::Axis axis);

struct ExperimentConfig {
  std::string name = "experiment";
  GenSpec generator{};
  bool generator_seed_set = false;
  StateSpec state{};
  LossConfig loss{};
  bool auto_betti_targets = true;
  SurgeryConfig surgery{};
  RunSpec run{};
  std::optional<DelayConfig> delay;
  CertifySpec certify{};
  LimitInputs limits{};
  bool limits_dim_set = false;
  std::optional<SweepSpec> sweep;
};

// Strict parse: unknown keys, wrong types and out-of-range values raise
// ConfigParse naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
// Fully normalized config, defaults included.
nlohmann::json echo_config(const ExperimentConfig& cfg);

// Applies ONN_LYAP_SEED when set.
void apply_seed_override(ExperimentConfig& cfg);

// Trial t uses seed + t for the generator, the initial state and the run.
struct TrialSeeds {
  std::uint64_t generator;
  std::uint64_t state;
  std::uint64_t run;
};
TrialSeeds trial_seeds(const ExperimentConfig& cfg, std::size_t trial);

WeightedGraph trial_graph(const ExperimentConfig& cfg, std::size_t trial);
SemanticState trial_state(const ExperimentConfig& cfg, std::size_t trial);

struct ExperimentRun {
  WeightedGraph initial_graph;
  TrajectoryRecord trajectory;
  OnnState final_state;
};

ExperimentRun run_experiment(const ExperimentConfig& cfg, std::size_t trial = 0);
nlohmann::json run_summary(const ExperimentConfig& cfg, const ExperimentRun& run);

struct SweepRow {
  double value = 0.0;
  std::size_t trials = 0;
  // p and k axes
  double mu_mean = 0.0;
  double mu_std = 0.0;
  double r2_mean = 0.0;
  double final_loss_mean = 0.0;
  bool betti_stable = true;
  double xi_mean = 0.0;  // NaN when no trial had a defined efficiency
  // tau axis
  double stable_fraction = 0.0;
  double rate_mean = 0.0;
  double rate_std = 0.0;
  double tau_max = 0.0;
  double degraded_rate = 0.0;
};

struct SweepResult {
  SweepSpec::Axis axis = SweepSpec::Axis::P;
  std::vector<SweepRow> rows;
};

// Jobs (value, trial) run in parallel over `threads` OpenMP threads and are
// collected by index, so the result does not depend on the thread count.
SweepResult run_sweep(const ExperimentConfig& cfg, int threads = 1);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result);

nlohmann::json certify_json(const ExperimentConfig& cfg);
nlohmann::json limits_json(const LimitReport& report);

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::filesystem::path graph;
  int threads = 1;
  bool quiet = false;
};

// Subcommands. Exit codes: 0 success, 1 runtime failure, 2 config error.
int cmd_run(const CliOptions& opts);
int cmd_sweep(const CliOptions& opts);
int cmd_certify(const CliOptions& opts);
int cmd_persistence(const CliOptions& opts);
int cmd_limits(const CliOptions& opts);

}  // namespace onn
