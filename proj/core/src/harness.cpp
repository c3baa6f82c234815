#include "gradpush/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "gradpush/errors.hpp"
#include "gradpush/pushsum.hpp"
#include "gradpush/rng.hpp"

namespace gradpush {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t tag) {
  return mix_keys({master, run, tag});
}

GraphSequence build_graph_sequence(const GraphConfig& graph, int n,
                                   std::uint64_t graph_seed) {
  switch (graph.generator) {
    case GraphGeneratorKind::cycle_plus_random:
      return generate_cycle_plus_random(n, graph.fixed_seed.value_or(graph_seed));
    case GraphGeneratorKind::alternating_stars:
      return generate_alternating_stars(n, graph.hub_a, graph.hub_b);
    case GraphGeneratorKind::complete:
      return generate_complete(n);
    case GraphGeneratorKind::ring:
      return generate_ring(n);
    case GraphGeneratorKind::edge_list:
      return load_edge_list_sequence(graph.path, n);
  }
  throw ValidationError("build_graph_sequence: unhandled generator");
}

NetworkObjective build_objective(const ObjectiveConfig& objective, int n, int d,
                                 std::uint64_t objective_seed) {
  std::uint64_t seed = objective.fixed_seed.value_or(objective_seed);
  switch (objective.preset) {
    case ObjectivePresetKind::quadratic_estimation:
      return quadratic_estimation_preset(n, seed, objective.theta_hat,
                                         objective.noise_c);
    case ObjectivePresetKind::random_quadratic:
      return random_quadratic_network(n, d, seed, objective.mu_lo, objective.mu_hi,
                                      objective.noise_c);
  }
  throw ValidationError("build_objective: unhandled preset");
}

Eigen::MatrixXd build_initial_points(const InitConfig& init, int n, int d,
                                     std::uint64_t init_seed) {
  if (init.mode == InitMode::zeros) return Eigen::MatrixXd::Zero(n, d);
  Rng rng(init_seed);
  Eigen::MatrixXd x0(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) x0(i, k) = init.scale * rng.normal();
  return x0;
}

StepSchedule build_schedule(const ScheduleConfig& schedule, const NetworkObjective& obj,
                            const GraphSequence& seq, int B) {
  switch (schedule.mode) {
    case ScheduleMode::theorem1:
      return theorem1_schedule(obj.mus());
    case ScheduleMode::conservative_min: {
      int rounds = schedule.rounds.value_or(seq.node_count() * B);
      auto consensus = min_consensus(obj.mus(), seq, rounds);
      return conservative_p_from_min(consensus, seq.node_count());
    }
    case ScheduleMode::explicit_p:
      return StepSchedule{schedule.p};
  }
  throw ValidationError("build_schedule: unhandled mode");
}

std::vector<int> select_sample_nodes(const ExperimentConfig& cfg) {
  if (!cfg.sample_nodes.empty()) {
    std::vector<int> nodes = cfg.sample_nodes;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
  }
  int count = std::min(cfg.sample_count, cfg.n);
  Rng rng{cfg.seed, seed_tag::sample};
  std::vector<int> pool(cfg.n);
  for (int i = 0; i < cfg.n; ++i) pool[i] = i;
  // partial Fisher-Yates, then sort for stable output order
  for (int i = 0; i < count; ++i) {
    int j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(cfg.n - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> nodes(pool.begin(), pool.begin() + count);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

namespace {

double safe_log_abs(double v) { return std::log(std::max(std::abs(v), 1e-300)); }

struct MetricFlags {
  bool ln_err_z = false;
  bool ln_err_zhat = false;
  bool dist_z = false;
  bool dist_zhat = false;
  bool fgap_zhat = false;
  bool thm1_lhs = false;
  bool zhat = false;
  bool consensus = false;
  bool max_z_norm = false;
  bool perturb_l1 = false;

  explicit MetricFlags(const std::set<std::string>& metrics) {
    ln_err_z = metrics.count("ln_err_z");
    ln_err_zhat = metrics.count("ln_err_zhat");
    dist_z = metrics.count("dist_z");
    dist_zhat = metrics.count("dist_zhat");
    fgap_zhat = metrics.count("fgap_zhat");
    thm1_lhs = metrics.count("thm1_lhs");
    zhat = metrics.count("zhat");
    consensus = metrics.count("consensus_residual");
    max_z_norm = metrics.count("max_z_norm");
    perturb_l1 = metrics.count("perturb_l1");
  }
};

RunTrace execute_run(const ExperimentConfig& cfg, int run_index,
                     const std::vector<int>& sample) {
  RunTrace trace;
  trace.run_index = run_index;
  const std::uint64_t master = cfg.seed;
  const auto run_u = static_cast<std::uint64_t>(run_index);

  NetworkObjective objective = build_objective(
      cfg.objective, cfg.n, cfg.d, derive_seed(master, run_u, seed_tag::objective));
  GraphSequence seq = build_graph_sequence(cfg.graph, cfg.n,
                                           derive_seed(master, run_u, seed_tag::graph));
  StepSchedule schedule = build_schedule(cfg.schedule, objective, seq, cfg.graph.B);

  std::uint64_t init_seed = cfg.init.mode == InitMode::gaussian_fixed
                                ? derive_seed(master, 0, seed_tag::init)
                                : derive_seed(master, run_u, seed_tag::init);
  Eigen::MatrixXd x0 = build_initial_points(cfg.init, cfg.n, cfg.d, init_seed);

  const std::uint64_t noise_seed = derive_seed(master, run_u, seed_tag::noise);
  const NoiseLaw law = cfg.objective.noise_law;
  GradientOracle oracle = [&objective, noise_seed, law](
                              int node, const Eigen::VectorXd& point, std::uint64_t t) {
    Rng rng{noise_seed, static_cast<std::uint64_t>(node), t};
    return noisy_gradient(objective.nodes[node], point, rng, law).value;
  };

  OptimizerState state(x0);
  const MetricFlags flags(cfg.metrics);
  const Eigen::VectorXd& z_star = objective.minimizer;
  const bool scalar = cfg.d == 1;

  trace.log(0, -1, "x0_l1", x0.cwiseAbs().sum());

  MixingMatrix A;
  if (seq.time_invariant()) A = build_mixing_matrix(seq.at(0));

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    if (!seq.time_invariant())
      A = build_mixing_matrix(seq.at(static_cast<std::uint64_t>(t - 1)));
    try {
      sgp_step(state, A, oracle, schedule);
    } catch (const DivergenceError&) {
      trace.diverged = true;
      break;
    }

    double mu_penalty = 0.0;
    if (flags.thm1_lhs) {
      for (int j = 0; j < cfg.n; ++j)
        mu_penalty += objective.nodes[j].mu *
                      (state.zhat.row(j).transpose() - z_star).squaredNorm();
    }

    for (int i : sample) {
      Eigen::VectorXd zi = state.push.z.row(i).transpose();
      Eigen::VectorXd zhi = state.zhat.row(i).transpose();
      if (flags.ln_err_z && scalar)
        trace.log(t, i, "ln_err_z", safe_log_abs(zi(0) - z_star(0)));
      if (flags.ln_err_zhat && scalar)
        trace.log(t, i, "ln_err_zhat", safe_log_abs(zhi(0) - z_star(0)));
      if (flags.dist_z) trace.log(t, i, "dist_z", (zi - z_star).norm());
      if (flags.dist_zhat) trace.log(t, i, "dist_zhat", (zhi - z_star).norm());
      if (flags.fgap_zhat) trace.log(t, i, "fgap_zhat", objective.gap(zhi));
      if (flags.thm1_lhs)
        trace.log(t, i, "thm1_lhs", objective.gap(zhi) + mu_penalty);
      if (flags.zhat)
        for (int k = 0; k < cfg.d; ++k)
          trace.log(t, i, "zhat" + std::to_string(k), zhi(k));
    }

    if (flags.consensus)
      trace.log(t, -1, "consensus_residual", consensus_residual(state.push));
    if (flags.max_z_norm)
      trace.log(t, -1, "max_z_norm", state.push.z.rowwise().norm().maxCoeff());
    if (flags.perturb_l1) {
      double alpha = schedule.alpha(static_cast<std::uint64_t>(t));
      trace.log(t, -1, "perturb_l1", alpha * state.last_gradient.cwiseAbs().sum());
    }
  }
  return trace;
}

}  // namespace

TraceBundle run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<int> sample = select_sample_nodes(cfg);

  TraceBundle bundle;
  {
    std::ostringstream meta;
    meta << "gradpush experiment";
    if (!cfg.name.empty()) meta << " \"" << cfg.name << "\"";
    bundle.comments.push_back(meta.str());
  }
  {
    std::ostringstream meta;
    meta << "n=" << cfg.n << " d=" << cfg.d << " horizon=" << cfg.horizon
         << " runs=" << cfg.runs << " seed=" << cfg.seed;
    bundle.comments.push_back(meta.str());
  }
  {
    std::ostringstream meta;
    meta << "sample_nodes:";
    for (std::size_t i = 0; i < sample.size(); ++i)
      meta << (i == 0 ? " " : ",") << sample[i];
    bundle.comments.push_back(meta.str());
  }

  bundle.runs.resize(cfg.runs);
  std::atomic<int> next_run{0};
  unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(cfg.runs)));
  auto work = [&]() {
    for (int r = next_run.fetch_add(1); r < cfg.runs; r = next_run.fetch_add(1))
      bundle.runs[r] = execute_run(cfg, r, sample);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (unsigned i = 0; i < workers; ++i)
      futures.push_back(std::async(std::launch::async, work));
    for (auto& f : futures) f.get();
  }
  return bundle;
}

FitResult rate_fit(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 3)
    throw ValidationError("rate_fit: need at least 3 points in the window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(series.size());
  std::vector<std::pair<double, double>> logs;
  logs.reserve(series.size());
  for (auto [t, v] : series) {
    if (!(t > 0.0)) throw ValidationError("rate_fit: time values must be positive");
    if (!(v > 0.0))
      throw ValidationError("rate_fit: non-positive metric value in the window");
    logs.emplace_back(std::log(t), std::log(v));
  }
  for (auto [x, y] : logs) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = sxx - sx * sx / n;
  if (denom <= 0.0) throw ValidationError("rate_fit: degenerate time window");
  FitResult fit;
  fit.slope = (sxy - sx * sy / n) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points = static_cast<int>(series.size());
  double ss_res = 0.0;
  for (auto [x, y] : logs) {
    double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  if (series.size() > 2)
    fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / denom);
  return fit;
}

FitResult rate_fit(const TraceBundle& traces, const std::string& metric,
                   std::int64_t from, std::int64_t to, bool conservative) {
  if (from > to) throw ValidationError("rate_fit: empty window");
  std::vector<std::pair<double, double>> series;
  for (std::int64_t t : metric_times(traces, metric)) {
    if (t < from || t > to) continue;
    std::vector<double> values = metric_values_at(traces, metric, t);
    if (values.empty()) continue;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double aggregate = mean;
    if (conservative && values.size() > 1) {
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size() - 1);
      aggregate = mean + 2.0 * std::sqrt(var / static_cast<double>(values.size()));
    }
    series.emplace_back(static_cast<double>(t), aggregate);
  }
  if (series.empty())
    throw ValidationError("rate_fit: metric \"" + metric + "\" has no data in window");
  return rate_fit(series);
}

double theorem1_rhs(const BoundInputs& inputs, const SpectralConstants& constants,
                    double x0_l1_sum, std::int64_t tau) {
  if (tau < 2) throw ValidationError("theorem1_rhs: tau must be >= 2");
  const auto n = static_cast<double>(inputs.L.size());
  double L = 0.0, q_sq = 0.0, maxB = 0.0;
  const double sqrt_d = std::sqrt(static_cast<double>(inputs.d));
  for (std::size_t j = 0; j < inputs.L.size(); ++j) {
    double Lc = inputs.L[j] + inputs.c[j];
    L += inputs.L[j];
    q_sq += Lc * Lc;
    maxB = std::max(maxB, sqrt_d * Lc);
  }
  const double tau_d = static_cast<double>(tau);
  const double delta = constants.delta;
  const double lambda = constants.lambda;
  double transient = 80.0 * L / (tau_d * delta) * lambda / (1.0 - lambda) * x0_l1_sum;
  double log_term = 80.0 * inputs.p * L * n * maxB / (tau_d * delta * (1.0 - lambda)) *
                    (1.0 + std::log(tau_d - 1.0));
  double noise_term = inputs.p / tau_d * q_sq;
  return transient + log_term + noise_term;
}

BoundReport theorem1_bound_report(const TraceBundle& traces, const BoundInputs& inputs,
                                  const SpectralConstants& constants,
                                  const std::vector<std::int64_t>& tau_list) {
  if (inputs.L.size() != inputs.c.size() || inputs.L.size() != inputs.mu.size())
    throw ValidationError("theorem1_bound_report: per-node input sizes differ");

  BoundReport report;
  report.inputs = inputs;
  report.constants = constants;

  for (const auto& run : traces.runs)
    for (const auto& rec : run.records)
      if (rec.metric == "max_z_norm")
        report.measured_max_norm = std::max(report.measured_max_norm, rec.value);
  if (inputs.D < report.measured_max_norm)
    throw ValidationError(
        "theorem1_bound_report: D is below the measured max iterate norm (" +
        std::to_string(report.measured_max_norm) + "); the bound inputs are unsound");

  for (double v : metric_values_at(traces, "x0_l1", 0))
    report.x0_l1_sum = std::max(report.x0_l1_sum, v);

  std::vector<int> nodes = metric_nodes(traces, "thm1_lhs");
  if (nodes.empty())
    throw ValidationError("theorem1_bound_report: trace has no thm1_lhs metric");

  for (std::int64_t tau : tau_list) {
    BoundReportRow row;
    row.tau = tau;
    const auto n = static_cast<double>(inputs.L.size());
    const double sqrt_d = std::sqrt(static_cast<double>(inputs.d));
    double L = 0.0, q_sq = 0.0, maxB = 0.0;
    for (std::size_t j = 0; j < inputs.L.size(); ++j) {
      double Lc = inputs.L[j] + inputs.c[j];
      L += inputs.L[j];
      q_sq += Lc * Lc;
      maxB = std::max(maxB, sqrt_d * Lc);
    }
    const double tau_d = static_cast<double>(tau);
    row.term_transient = 80.0 * L / (tau_d * constants.delta) * constants.lambda /
                         (1.0 - constants.lambda) * report.x0_l1_sum;
    row.term_log = 80.0 * inputs.p * L * n * maxB /
                   (tau_d * constants.delta * (1.0 - constants.lambda)) *
                   (1.0 + std::log(tau_d - 1.0));
    row.term_noise = inputs.p / tau_d * q_sq;
    row.rhs = row.term_transient + row.term_log + row.term_noise;

    bool have_data = false;
    for (int node : nodes) {
      std::vector<double> values = metric_values_at(traces, "thm1_lhs", tau, node);
      if (values.empty()) continue;
      have_data = true;
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double se = 0.0;
      if (values.size() > 1) {
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size() - 1);
        se = std::sqrt(var / static_cast<double>(values.size()));
      }
      if (mean + 2.0 * se > row.lhs_conservative) {
        row.lhs_mean = mean;
        row.lhs_se = se;
        row.lhs_conservative = mean + 2.0 * se;
      }
    }
    if (!have_data)
      throw ValidationError("theorem1_bound_report: no thm1_lhs records at tau=" +
                            std::to_string(tau));
    row.satisfied = row.lhs_conservative <= row.rhs;
    report.all_satisfied = report.all_satisfied && row.satisfied;
    report.rows.push_back(row);
  }
  return report;
}

void BoundednessMonitor::observe(double value) {
  double current = history_.empty() ? value : std::max(history_.back(), value);
  history_.push_back(current);
}

bool BoundednessMonitor::plateaued(double burn_in_fraction, double rel_tol) const {
  if (history_.size() < 2) return true;
  auto idx = static_cast<std::size_t>(burn_in_fraction *
                                      static_cast<double>(history_.size()));
  idx = std::min(std::max<std::size_t>(idx, 1), history_.size() - 1);
  double at_burn_in = history_[idx - 1];
  if (at_burn_in == 0.0) return history_.back() == 0.0;
  return history_.back() <= at_burn_in * (1.0 + rel_tol);
}

}  // namespace gradpush
