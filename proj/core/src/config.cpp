#include "gradpush/config.hpp"

#include <fstream>
#include <sstream>

#include "gradpush/errors.hpp"
#include "json.hpp"

namespace gradpush {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ValidationError(origin + ": " + msg);
}

void require_keys(const json& obj, const std::string& origin, const std::string& where,
                  const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      fail(origin, where + ": unknown key \"" + it.key() + "\"");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& origin, const std::string& field,
         T fallback) {
  if (!obj.contains(field)) return fallback;
  try {
    return obj.at(field).get<T>();
  } catch (const json::exception&) {
    fail(origin, "field \"" + field + "\" has the wrong type");
  }
}

template <typename T>
T get_required(const json& obj, const std::string& origin, const std::string& field) {
  if (!obj.contains(field)) fail(origin, "missing required field \"" + field + "\"");
  try {
    return obj.at(field).get<T>();
  } catch (const json::exception&) {
    fail(origin, "field \"" + field + "\" has the wrong type");
  }
}

GraphConfig parse_graph(const json& obj, const std::string& origin) {
  require_keys(obj, origin, "graph",
               {"generator", "hub_a", "hub_b", "path", "fixed_seed", "B"});
  GraphConfig g;
  auto name = get_required<std::string>(obj, origin, "generator");
  if (name == "cycle_plus_random")
    g.generator = GraphGeneratorKind::cycle_plus_random;
  else if (name == "alternating_stars")
    g.generator = GraphGeneratorKind::alternating_stars;
  else if (name == "complete")
    g.generator = GraphGeneratorKind::complete;
  else if (name == "ring")
    g.generator = GraphGeneratorKind::ring;
  else if (name == "edge_list")
    g.generator = GraphGeneratorKind::edge_list;
  else
    fail(origin, "graph.generator: unknown generator \"" + name + "\"");
  g.hub_a = get_or<int>(obj, origin, "hub_a", 0);
  g.hub_b = get_or<int>(obj, origin, "hub_b", 1);
  g.path = get_or<std::string>(obj, origin, "path", "");
  if (obj.contains("fixed_seed"))
    g.fixed_seed = get_required<std::uint64_t>(obj, origin, "fixed_seed");
  g.B = get_or<int>(obj, origin, "B", 1);
  return g;
}

ObjectiveConfig parse_objective(const json& obj, const std::string& origin) {
  require_keys(obj, origin, "objective",
               {"preset", "theta_hat", "mu_lo", "mu_hi", "noise_c", "noise_law",
                "fixed_seed"});
  ObjectiveConfig o;
  auto name = get_required<std::string>(obj, origin, "preset");
  if (name == "quadratic_estimation")
    o.preset = ObjectivePresetKind::quadratic_estimation;
  else if (name == "random_quadratic")
    o.preset = ObjectivePresetKind::random_quadratic;
  else
    fail(origin, "objective.preset: unknown preset \"" + name + "\"");
  o.theta_hat = get_or<double>(obj, origin, "theta_hat", 0.0);
  o.mu_lo = get_or<double>(obj, origin, "mu_lo", 1.0);
  o.mu_hi = get_or<double>(obj, origin, "mu_hi", 4.0);
  o.noise_c = get_or<double>(obj, origin, "noise_c", 0.0);
  auto law = get_or<std::string>(obj, origin, "noise_law", "uniform_ball");
  if (law == "uniform_ball")
    o.noise_law = NoiseLaw::uniform_ball;
  else if (law == "gaussian_rejection")
    o.noise_law = NoiseLaw::gaussian_rejection;
  else
    fail(origin, "objective.noise_law: unknown law \"" + law + "\"");
  if (obj.contains("fixed_seed"))
    o.fixed_seed = get_required<std::uint64_t>(obj, origin, "fixed_seed");
  return o;
}

InitConfig parse_init(const json& obj, const std::string& origin) {
  require_keys(obj, origin, "init", {"mode", "scale"});
  InitConfig i;
  auto mode = get_or<std::string>(obj, origin, "mode", "gaussian");
  if (mode == "gaussian")
    i.mode = InitMode::gaussian;
  else if (mode == "gaussian_fixed")
    i.mode = InitMode::gaussian_fixed;
  else if (mode == "zeros")
    i.mode = InitMode::zeros;
  else
    fail(origin, "init.mode: unknown mode \"" + mode + "\"");
  i.scale = get_or<double>(obj, origin, "scale", 1.0);
  return i;
}

ScheduleConfig parse_schedule(const json& obj, const std::string& origin) {
  require_keys(obj, origin, "schedule", {"mode", "p", "rounds"});
  ScheduleConfig s;
  auto mode = get_required<std::string>(obj, origin, "mode");
  if (mode == "theorem1")
    s.mode = ScheduleMode::theorem1;
  else if (mode == "conservative_min")
    s.mode = ScheduleMode::conservative_min;
  else if (mode == "explicit")
    s.mode = ScheduleMode::explicit_p;
  else
    fail(origin, "schedule.mode: unknown mode \"" + mode + "\"");
  if (s.mode == ScheduleMode::explicit_p)
    s.p = get_required<double>(obj, origin, "p");
  else if (obj.contains("p"))
    fail(origin, "schedule.p: only valid with mode \"explicit\"");
  if (obj.contains("rounds"))
    s.rounds = get_required<int>(obj, origin, "rounds");
  return s;
}

}  // namespace

const std::set<std::string>& known_metrics() {
  static const std::set<std::string> metrics = {
      "ln_err_z",  "ln_err_zhat", "dist_z",        "dist_zhat", "fgap_zhat",
      "thm1_lhs",  "zhat",        "consensus_residual", "max_z_norm",
      "perturb_l1"};
  return metrics;
}

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be an object");
  require_keys(root, origin, "top level",
               {"name", "n", "d", "horizon", "runs", "seed", "graph", "objective",
                "init", "schedule", "metrics", "sample_nodes", "output"});

  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(root, origin, "name", "");
  cfg.n = get_required<int>(root, origin, "n");
  cfg.d = get_or<int>(root, origin, "d", 1);
  cfg.horizon = get_required<std::int64_t>(root, origin, "horizon");
  cfg.runs = get_or<int>(root, origin, "runs", 1);
  cfg.seed = get_or<std::uint64_t>(root, origin, "seed", 0);

  if (!root.contains("graph")) fail(origin, "missing required field \"graph\"");
  cfg.graph = parse_graph(root.at("graph"), origin);
  if (!root.contains("objective")) fail(origin, "missing required field \"objective\"");
  cfg.objective = parse_objective(root.at("objective"), origin);
  cfg.init = root.contains("init") ? parse_init(root.at("init"), origin) : InitConfig{};
  cfg.schedule = root.contains("schedule") ? parse_schedule(root.at("schedule"), origin)
                                           : ScheduleConfig{};

  if (root.contains("metrics")) {
    for (const auto& m : get_required<std::vector<std::string>>(root, origin, "metrics"))
      cfg.metrics.insert(m);
  } else {
    cfg.metrics = {"ln_err_z",  "ln_err_zhat",        "dist_z",    "dist_zhat",
                   "fgap_zhat", "consensus_residual", "max_z_norm"};
    if (cfg.d != 1) {
      cfg.metrics.erase("ln_err_z");
      cfg.metrics.erase("ln_err_zhat");
    }
  }

  if (root.contains("sample_nodes")) {
    const json& sn = root.at("sample_nodes");
    if (sn.is_number_integer()) {
      cfg.sample_count = sn.get<int>();
    } else if (sn.is_array()) {
      cfg.sample_nodes = sn.get<std::vector<int>>();
    } else {
      fail(origin, "sample_nodes: expected an integer count or an array of node ids");
    }
  }
  cfg.output = get_or<std::string>(root, origin, "output", "trace.csv");

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
  const std::string o = cfg.name.empty() ? "config" : "config \"" + cfg.name + "\"";
  if (cfg.n < 1) fail(o, "n: must be >= 1");
  if (cfg.d < 1) fail(o, "d: must be >= 1");
  if (cfg.horizon < 2) fail(o, "horizon: must be >= 2");
  if (cfg.runs < 1) fail(o, "runs: must be >= 1");

  switch (cfg.graph.generator) {
    case GraphGeneratorKind::cycle_plus_random:
      if (cfg.n < 2) fail(o, "graph: cycle_plus_random needs n >= 2");
      break;
    case GraphGeneratorKind::alternating_stars:
      if (cfg.graph.hub_a == cfg.graph.hub_b) fail(o, "graph: hubs must differ");
      if (cfg.graph.hub_a < 0 || cfg.graph.hub_a >= cfg.n || cfg.graph.hub_b < 0 ||
          cfg.graph.hub_b >= cfg.n)
        fail(o, "graph: hub index out of range");
      break;
    case GraphGeneratorKind::edge_list:
      if (cfg.graph.path.empty()) fail(o, "graph: edge_list requires \"path\"");
      break;
    default:
      break;
  }
  if (cfg.graph.B < 1) fail(o, "graph.B: must be >= 1");

  if (cfg.objective.preset == ObjectivePresetKind::quadratic_estimation && cfg.d != 1)
    fail(o, "objective: quadratic_estimation is one-dimensional (d must be 1)");
  if (cfg.objective.preset == ObjectivePresetKind::random_quadratic &&
      (!(cfg.objective.mu_lo > 0.0) || cfg.objective.mu_hi < cfg.objective.mu_lo))
    fail(o, "objective: need 0 < mu_lo <= mu_hi");
  if (cfg.objective.noise_c < 0.0) fail(o, "objective.noise_c: must be >= 0");

  if (cfg.schedule.mode == ScheduleMode::explicit_p && !(cfg.schedule.p > 0.0))
    fail(o, "schedule.p: must be positive");
  if (cfg.schedule.rounds && *cfg.schedule.rounds < 1)
    fail(o, "schedule.rounds: must be >= 1");

  for (const auto& m : cfg.metrics) {
    if (!known_metrics().count(m)) fail(o, "metrics: unknown metric \"" + m + "\"");
    if ((m == "ln_err_z" || m == "ln_err_zhat") && cfg.d != 1)
      fail(o, "metrics: " + m + " requires d = 1");
  }

  if (!cfg.sample_nodes.empty()) {
    for (int id : cfg.sample_nodes)
      if (id < 0 || id >= cfg.n) fail(o, "sample_nodes: node id out of range");
  } else if (cfg.sample_count < 1) {
    fail(o, "sample_nodes: count must be >= 1");
  }
  if (cfg.output.empty()) fail(o, "output: must be a non-empty path");
}

}  // namespace gradpush
