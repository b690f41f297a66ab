#include "onn/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "onn/error.hpp"

namespace onn {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ConfigParse, what); }

// One JSON object of the config; records which keys were read so leftovers
// can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) parse_error("'" + path_ + "' must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) parse_error("missing key '" + name(key) + "'");
    return j_.at(key);
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_number()) parse_error("'" + name(key) + "' must be a number");
    return v.get<double>();
  }

  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      parse_error("'" + name(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key) && fallback) return *fallback;
    const json& v = at(key);
    if (!v.is_string()) parse_error("'" + name(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) parse_error("'" + name(key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) parse_error("'" + name(key) + "' must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  Section child(const std::string& key) { return Section(at(key), name(key)); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) parse_error("unknown key '" + name(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum>
Enum pick(const std::string& key, const std::string& value, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (const auto& [label, e] : options) {
    if (value == label) return e;
  }
  std::string all;
  for (const auto& [label, e] : options) all += std::string(all.empty() ? "" : ", ") + label;
  parse_error("'" + key + "' must be one of: " + all + " (got '" + value + "')");
}

void parse_generator(Section s, ExperimentConfig& cfg) {
  GenSpec& g = cfg.generator;
  try {
    g.kind = parse_graph_kind(s.text("kind"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigParse) throw;
    parse_error("'generator.kind': " + std::string(e.what()));
  }
  g.n = s.count("n");
  g.k = s.count("k", 2);
  g.communities = s.count("communities", 1);
  if (s.has("seed")) {
    g.seed = s.count("seed");
    cfg.generator_seed_set = true;
  }
  if (s.has("weights")) {
    Section w = s.child("weights");
    g.weights.kind = pick(w.name("law"), w.text("law"),
                          {std::pair{"unit", WeightLaw::Kind::Unit}, std::pair{"uniform", WeightLaw::Kind::Uniform}});
    if (g.weights.kind == WeightLaw::Kind::Uniform) {
      g.weights.a = w.number("a");
      g.weights.b = w.number("b");
      if (!(g.weights.a > 0.0 && g.weights.b >= g.weights.a)) parse_error("'generator.weights' needs 0 < a <= b");
    }
    w.finish();
  }
  if (g.n == 0) parse_error("'generator.n' must be >= 1");
  s.finish();
}

void parse_state(Section s, ExperimentConfig& cfg) {
  cfg.state.d = s.count("d", 4);
  if (cfg.state.d == 0) parse_error("'state.d' must be >= 1");
  cfg.state.law = pick(s.name("law"), s.text("law", "gaussian"),
                       {std::pair{"gaussian", InitLaw::Gaussian}, std::pair{"cluster_centroids", InitLaw::ClusterCentroids}});
  if (s.has("seed")) cfg.state.seed = s.count("seed");
  s.finish();
}

void parse_loss(Section s, ExperimentConfig& cfg) {
  LossConfig& l = cfg.loss;
  if (s.has("ricci")) {
    Section r = s.child("ricci");
    l.ricci.variant = pick(r.name("variant"), r.text("variant", "hinge_zero"),
                           {std::pair{"hinge_zero", RicciVariant::HingeZero}, std::pair{"hinge_target", RicciVariant::HingeTarget}});
    l.ricci.kappa_min = r.number("kappa_min", 0.0);
    l.ricci.lambda_boundary = r.number("lambda_boundary", 0.0);
    r.finish();
  }
  l.lambda_ricci = s.number("lambda_ricci", 1.0);
  l.lambda_homology = s.number("lambda_homology", 1.0);
  l.lambda_curv = s.number("lambda_curv", 0.0);
  l.curv_rho = s.number("curv_rho", 0.0);
  for (const char* key : {"lambda_ricci", "lambda_homology", "lambda_curv", "curv_rho"}) {
    if (s.has(key) && !(s.number(key) >= 0.0)) parse_error("'" + s.name(key) + "' must be >= 0");
  }
  if (s.has("betti_targets")) {
    const json& t = s.at("betti_targets");
    if (t.is_string() && t.get<std::string>() == "auto") {
      cfg.auto_betti_targets = true;
    } else if (t.is_array() && t.size() == 2 && t[0].is_number_unsigned() && t[1].is_number_unsigned()) {
      cfg.auto_betti_targets = false;
      l.betti_targets = {t[0].get<Index>(), t[1].get<Index>()};
    } else {
      parse_error("'loss.betti_targets' must be \"auto\" or [beta0, beta1]");
    }
  }
  if (s.has("connection")) {
    Section c = s.child("connection");
    const std::string kind = c.text("kind", "zero");
    if (kind == "zero") {
      l.connection = ConnectionOperator::zero();
    } else if (kind == "scaled_laplacian") {
      const double scale = c.number("scale");
      if (!(scale >= 0.0)) parse_error("'loss.connection.scale' must be >= 0");
      l.connection = ConnectionOperator::scaled_laplacian(scale);
    } else {
      parse_error("'loss.connection.kind' must be one of: zero, scaled_laplacian (got '" + kind + "')");
    }
    c.finish();
  }
  s.finish();
}

void parse_surgery(Section s, ExperimentConfig& cfg) {
  SurgeryConfig& c = cfg.surgery;
  c.mode = pick(s.name("mode"), s.text("mode", "rewire"),
                {std::pair{"decay", SurgeryMode::Decay}, std::pair{"rewire", SurgeryMode::Rewire},
                 std::pair{"ricci_flow", SurgeryMode::RicciFlow}});
  c.p = s.number("p", 0.0);
  c.delta = s.number("delta", 0.05);
  c.theta = s.number("theta", 0.0);
  c.k_target = s.number("k_target", 2.0);
  c.pool = s.count("pool", 32);
  try {
    validate(c);
  } catch (const Error& e) {
    parse_error(e.what());
  }
  s.finish();
}

void parse_run(Section s, ExperimentConfig& cfg) {
  RunConfig& r = cfg.run.config;
  r.iterations = s.count("iterations");
  cfg.run.seed = s.count("seed");
  if (s.has("eta")) {
    const json& eta = s.at("eta");
    if (eta.is_string() && eta.get<std::string>() == "auto") {
      r.eta_rule = EtaRule::Auto;
    } else if (eta.is_number() && eta.get<double>() > 0.0) {
      r.eta_rule = EtaRule::Fixed;
      r.eta = eta.get<double>();
    } else {
      parse_error("'run.eta' must be \"auto\" or a positive number");
    }
  }
  r.spectral_every = s.count("spectral_every", 25);
  if (r.spectral_every == 0) parse_error("'run.spectral_every' must be >= 1");
  r.fit_window = s.number("fit_window", 0.9);
  if (!(r.fit_window > 0.0 && r.fit_window <= 1.0)) parse_error("'run.fit_window' must lie in (0, 1]");
  s.finish();
}

void parse_delay(Section s, ExperimentConfig& cfg) {
  DelayConfig d;
  d.tau = s.number("tau", 0.0);
  d.dt = s.number("dt", 1e-3);
  d.horizon = s.number("horizon", 10.0);
  d.record_every = s.count("record_every", 1);
  d.seed = s.count("seed", cfg.run.seed);
  if (s.has("disturbance")) {
    Section w = s.child("disturbance");
    d.disturbance_kind = pick(w.name("kind"), w.text("kind", "none"),
                              {std::pair{"none", DisturbanceKind::None}, std::pair{"constant", DisturbanceKind::Constant},
                               std::pair{"sinusoid", DisturbanceKind::Sinusoid},
                               std::pair{"seeded_uniform", DisturbanceKind::SeededUniform}});
    d.disturbance_bound = w.number("bound", 0.0);
    d.disturbance_omega = w.number("omega", 1.0);
    w.finish();
  }
  try {
    validate(d);
  } catch (const Error& e) {
    parse_error(e.what());
  }
  cfg.delay = d;
  s.finish();
}

void parse_certify(Section s, ExperimentConfig& cfg) {
  cfg.certify.samples = s.count("samples", 64);
  cfg.certify.radius = s.number("radius", 1.0);
  if (!(cfg.certify.radius > 0.0)) parse_error("'certify.radius' must be > 0");
  if (s.has("taus")) cfg.certify.taus = s.numbers("taus");
  if (s.has("graph")) cfg.certify.graph = s.text("graph");
  s.finish();
}

void parse_limits(Section s, ExperimentConfig& cfg) {
  cfg.limits.delta = s.number("delta", 0.6);
  cfg.limits.epsilon = s.number("epsilon", 1e-3);
  if (s.has("dim")) {
    cfg.limits.dim = s.count("dim");
    cfg.limits_dim_set = true;
  }
  cfg.limits.laman_dim = s.count("laman_dim", 2);
  s.finish();
}

void parse_sweep(Section s, ExperimentConfig& cfg) {
  SweepSpec sw;
  int axes = 0;
  for (auto [key, axis] : {std::pair{"p", SweepSpec::Axis::P}, std::pair{"k", SweepSpec::Axis::K},
                           std::pair{"tau", SweepSpec::Axis::Tau}}) {
    if (!s.has(key)) continue;
    ++axes;
    sw.axis = axis;
    sw.values = s.numbers(key);
  }
  if (axes != 1) parse_error("'sweep' must define exactly one of the axes p, k, tau");
  if (sw.values.empty()) parse_error("'sweep' axis needs at least one value");
  sw.trials = s.count("trials", 1);
  if (sw.trials == 0) parse_error("'sweep.trials' must be >= 1");
  for (double v : sw.values) {
    if (sw.axis == SweepSpec::Axis::P && !(v >= 0.0 && v <= 1.0)) parse_error("'sweep.p' values must lie in [0, 1]");
    if (sw.axis == SweepSpec::Axis::K && !(v >= 1.0 && v == std::floor(v))) parse_error("'sweep.k' values must be positive integers");
    if (sw.axis == SweepSpec::Axis::Tau && !(v >= 0.0)) parse_error("'sweep.tau' values must be >= 0");
  }
  cfg.sweep = sw;
  s.finish();
}

std::string kind_name(SurgeryMode m) {
  switch (m) {
    case SurgeryMode::Decay:
      return "decay";
    case SurgeryMode::Rewire:
      return "rewire";
    case SurgeryMode::RicciFlow:
      return "ricci_flow";
  }
  return "rewire";
}

std::string kind_name(DisturbanceKind k) {
  switch (k) {
    case DisturbanceKind::None:
      return "none";
    case DisturbanceKind::Constant:
      return "constant";
    case DisturbanceKind::Sinusoid:
      return "sinusoid";
    case DisturbanceKind::SeededUniform:
      return "seeded_uniform";
  }
  return "none";
}

}  // namespace

std::string to_string(SweepSpec::Axis axis) {
  switch (axis) {
    case SweepSpec::Axis::P:
      return "p";
    case SweepSpec::Axis::K:
      return "k";
    case SweepSpec::Axis::Tau:
      return "tau";
  }
  return "p";
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  Section root(j, "");
  const std::string schema = root.text("schema");
  if (schema != kConfigSchema) parse_error("'schema' must be \"" + std::string(kConfigSchema) + "\" (got '" + schema + "')");
  cfg.name = root.text("name", "experiment");
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." || cfg.name == "..") {
    parse_error("'name' must be a plain directory name");
  }
  // run first: other sections default their seeds to run.seed.
  parse_run(root.child("run"), cfg);
  parse_generator(root.child("generator"), cfg);
  if (root.has("state")) parse_state(root.child("state"), cfg);
  if (root.has("loss")) parse_loss(root.child("loss"), cfg);
  if (root.has("surgery")) parse_surgery(root.child("surgery"), cfg);
  if (root.has("delay")) parse_delay(root.child("delay"), cfg);
  if (root.has("certify")) parse_certify(root.child("certify"), cfg);
  if (root.has("limits")) parse_limits(root.child("limits"), cfg);
  if (root.has("sweep")) parse_sweep(root.child("sweep"), cfg);
  root.finish();
  if (!cfg.generator_seed_set) cfg.generator.seed = cfg.run.seed;
  cfg.run.config.surgery = cfg.surgery;
  cfg.run.config.loss = cfg.loss;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot read config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    parse_error("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void apply_seed_override(ExperimentConfig& cfg) {
  const char* env = std::getenv("ONN_LYAP_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') parse_error("ONN_LYAP_SEED must be a non-negative integer");
  cfg.run.seed = seed;
  if (!cfg.generator_seed_set) cfg.generator.seed = seed;
  if (cfg.delay) cfg.delay->seed = seed;
}

json echo_config(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = kConfigSchema;
  j["name"] = cfg.name;
  const GenSpec& g = cfg.generator;
  j["generator"] = {{"kind", to_string(g.kind)}, {"n", g.n}, {"k", g.k}, {"communities", g.communities}, {"seed", g.seed}};
  if (g.weights.kind == WeightLaw::Kind::Uniform) {
    j["generator"]["weights"] = {{"law", "uniform"}, {"a", g.weights.a}, {"b", g.weights.b}};
  } else {
    j["generator"]["weights"] = {{"law", "unit"}};
  }
  j["state"] = {{"d", cfg.state.d}, {"law", cfg.state.law == InitLaw::Gaussian ? "gaussian" : "cluster_centroids"},
                {"seed", cfg.state.seed.value_or(cfg.run.seed)}};
  const LossConfig& l = cfg.loss;
  json loss = {{"ricci",
                {{"variant", l.ricci.variant == RicciVariant::HingeZero ? "hinge_zero" : "hinge_target"},
                 {"kappa_min", l.ricci.kappa_min},
                 {"lambda_boundary", l.ricci.lambda_boundary}}},
               {"lambda_ricci", l.lambda_ricci},
               {"lambda_homology", l.lambda_homology},
               {"lambda_curv", l.lambda_curv},
               {"curv_rho", l.curv_rho}};
  if (cfg.auto_betti_targets) {
    loss["betti_targets"] = "auto";
  } else {
    loss["betti_targets"] = {l.betti_targets.beta0, l.betti_targets.beta1};
  }
  if (l.connection.kind() == ConnectionOperator::Kind::ScaledLaplacian) {
    loss["connection"] = {{"kind", "scaled_laplacian"}, {"scale", l.connection.scale()}};
  } else {
    loss["connection"] = {{"kind", "zero"}};
  }
  j["loss"] = loss;
  const SurgeryConfig& s = cfg.surgery;
  j["surgery"] = {{"mode", kind_name(s.mode)}, {"p", s.p},         {"delta", s.delta},
                  {"theta", s.theta},          {"k_target", s.k_target}, {"pool", s.pool}};
  const RunConfig& r = cfg.run.config;
  j["run"] = {{"iterations", r.iterations}, {"spectral_every", r.spectral_every}, {"seed", cfg.run.seed},
              {"fit_window", r.fit_window}};
  if (r.eta_rule == EtaRule::Auto) {
    j["run"]["eta"] = "auto";
  } else {
    j["run"]["eta"] = r.eta;
  }
  if (cfg.delay) {
    const DelayConfig& d = *cfg.delay;
    j["delay"] = {{"tau", d.tau},
                  {"dt", d.dt},
                  {"horizon", d.horizon},
                  {"record_every", d.record_every},
                  {"seed", d.seed},
                  {"disturbance", {{"kind", kind_name(d.disturbance_kind)}, {"bound", d.disturbance_bound}, {"omega", d.disturbance_omega}}}};
  }
  j["certify"] = {{"samples", cfg.certify.samples}, {"radius", cfg.certify.radius}, {"taus", cfg.certify.taus}};
  if (cfg.certify.graph) j["certify"]["graph"] = *cfg.certify.graph;
  j["limits"] = {{"delta", cfg.limits.delta},
                 {"epsilon", cfg.limits.epsilon},
                 {"dim", cfg.limits_dim_set ? cfg.limits.dim : cfg.state.d},
                 {"laman_dim", cfg.limits.laman_dim}};
  if (cfg.sweep) {
    j["sweep"] = {{to_string(cfg.sweep->axis), cfg.sweep->values}, {"trials", cfg.sweep->trials}};
  }
  return j;
}

TrialSeeds trial_seeds(const ExperimentConfig& cfg, std::size_t trial) {
  const auto t = static_cast<std::uint64_t>(trial);
  return {cfg.generator.seed + t, cfg.state.seed.value_or(cfg.run.seed) + t, cfg.run.seed + t};
}

WeightedGraph trial_graph(const ExperimentConfig& cfg, std::size_t trial) {
  GenSpec spec = cfg.generator;
  spec.seed = trial_seeds(cfg, trial).generator;
  return generate(spec);
}

SemanticState trial_state(const ExperimentConfig& cfg, std::size_t trial) {
  return init_state(cfg.generator.n, cfg.state.d, cfg.state.law, trial_seeds(cfg, trial).state, cfg.generator.communities);
}

ExperimentRun run_experiment(const ExperimentConfig& cfg, std::size_t trial) {
  WeightedGraph g = trial_graph(cfg, trial);
  RunConfig rc = cfg.run.config;
  rc.surgery = cfg.surgery;
  rc.loss = cfg.loss;
  if (cfg.auto_betti_targets) rc.loss.betti_targets = betti(g);
  OnnState state(trial_state(cfg, trial), g, trial_seeds(cfg, trial).run);
  OnnState final_state = state;
  TrajectoryRecord traj = run(std::move(state), rc, &final_state);
  return ExperimentRun{std::move(g), std::move(traj), std::move(final_state)};
}

json run_summary(const ExperimentConfig& cfg, const ExperimentRun& r) {
  const TrajectoryRecord& t = r.trajectory;
  const TrajectoryRow& first = t.rows.front();
  const TrajectoryRow& last = t.rows.back();
  bool betti_stable = true;
  bool min_edges_ok = true;
  std::size_t swaps = 0;
  for (const TrajectoryRow& row : t.rows) {
    betti_stable = betti_stable && row.beta0 == first.beta0 && row.beta1 == first.beta1;
    min_edges_ok = min_edges_ok && row.edges >= min_edges(r.initial_graph.node_count(), row.beta0, row.beta1);
    swaps += row.swaps;
  }
  json xi = nullptr;
  try {
    xi = surgery_efficiency(t);
  } catch (const Error&) {
  }
  auto number = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json s;
  s["schema"] = kConfigSchema;
  s["name"] = cfg.name;
  s["iterations"] = t.summary.iterations;
  s["rows"] = t.rows.size();
  s["mu_emp"] = number(t.summary.mu_emp);
  s["r_squared"] = number(t.summary.r_squared);
  s["initial_loss"] = number(first.loss.total);
  s["final_loss"] = {{"total", number(last.loss.total)},
                     {"consensus", number(last.loss.consensus)},
                     {"connection", number(last.loss.connection)},
                     {"ricci", number(last.loss.ricci)},
                     {"homology", number(last.loss.homology)}};
  s["betti_initial"] = {first.beta0, first.beta1};
  s["betti_final"] = {last.beta0, last.beta1};
  s["betti_stable"] = betti_stable;
  s["min_edges_ok"] = min_edges_ok;
  s["edges_initial"] = first.edges;
  s["edges_final"] = last.edges;
  s["lambda2_initial"] = number(first.lambda2);
  s["lambda2_final"] = number(last.lambda2);
  s["surgery_events"] = t.events.size();
  s["total_swaps"] = swaps;
  s["xi"] = xi;
  return s;
}

}  // namespace onn
