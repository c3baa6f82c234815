// gradpush: drive subgradient-push experiments from the command line.
//
// Subcommands:
//   run          execute an experiment config and write the metric CSV
//   verify-graph check B-strong-connectivity of the configured sequence
//   bound        compare a trace against the convergence bound
//   fit          log-log slope of a metric over a time window
//
// Exit codes: 0 success, 1 validation error, 2 runtime divergence, 3 I/O.

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradpush/errors.hpp"
#include "gradpush/harness.hpp"

namespace fs = std::filesystem;
using namespace gradpush;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitIo = 3;

struct RunArgs {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int runs = 0;
  std::int64_t horizon = 0;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig cfg = load_config(args.config);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.runs > 0) cfg.runs = args.runs;
  if (args.horizon > 0) cfg.horizon = args.horizon;
  validate_config(cfg);

  TraceBundle traces = run_experiment(cfg);

  fs::path out_path = cfg.output;
  if (!args.out_dir.empty()) {
    fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
    out_path = dir / fs::path(cfg.output).filename();
  }
  emit_csv(traces, out_path.string());

  int diverged = 0;
  for (const auto& run : traces.runs) diverged += run.diverged ? 1 : 0;
  std::string divnote =
      diverged ? ", " + std::to_string(diverged) + " diverged" : std::string();
  std::printf("wrote %s: %d run(s), %zu records%s\n", out_path.string().c_str(),
              cfg.runs, traces.record_count(), divnote.c_str());
  return diverged > 0 ? kExitDivergence : kExitOk;
}

int cmd_verify_graph(const std::string& config_path, int B, std::int64_t horizon) {
  ExperimentConfig cfg = load_config(config_path);
  GraphSequence seq = build_graph_sequence(
      cfg.graph, cfg.n, derive_seed(cfg.seed, 0, seed_tag::graph));
  ConnectivityReport report =
      check_B_strong_connectivity(seq, B, static_cast<std::uint64_t>(horizon));
  if (report.connected) {
    std::printf("OK: %s on %d nodes is %d-strongly-connected over horizon %lld\n",
                seq.name().c_str(), cfg.n, B, static_cast<long long>(horizon));
    return kExitOk;
  }
  std::printf("FAIL: window %lld is not strongly connected (B=%d)\n",
              static_cast<long long>(report.first_failing_window), B);
  return kExitValidation;
}

std::vector<std::int64_t> parse_tau_list(const std::string& text, std::int64_t horizon) {
  if (text.empty()) {
    std::vector<std::int64_t> taus{10, 50, horizon - 1};
    std::vector<std::int64_t> clipped;
    for (auto t : taus)
      if (t >= 2 && t <= horizon) clipped.push_back(t);
    return clipped;
  }
  std::vector<std::int64_t> taus;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ',')) {
    try {
      taus.push_back(std::stoll(token));
    } catch (const std::exception&) {
      throw ValidationError("bound: malformed --tau entry \"" + token + "\"");
    }
  }
  return taus;
}

int cmd_bound(const std::string& config_path, const std::string& trace_path, double D,
              const std::string& tau_text) {
  ExperimentConfig cfg = load_config(config_path);
  if (!cfg.objective.fixed_seed)
    throw ValidationError(
        "bound: the config must pin objective.fixed_seed so the per-node "
        "constants are the same in every run of the trace");
  NetworkObjective objective = build_objective(cfg.objective, cfg.n, cfg.d, 0);
  GraphSequence seq = build_graph_sequence(
      cfg.graph, cfg.n, derive_seed(cfg.seed, 0, seed_tag::graph));
  SpectralConstants constants =
      spectral_constants(seq, cfg.graph.B, static_cast<std::uint64_t>(cfg.horizon));
  StepSchedule schedule = build_schedule(cfg.schedule, objective, seq, cfg.graph.B);

  TraceBundle traces = parse_csv(trace_path);

  BoundInputs inputs;
  inputs.D = D;
  inputs.p = schedule.p;
  inputs.d = cfg.d;
  for (const auto& node : objective.nodes) {
    inputs.L.push_back(gradient_norm_bound_on_ball(node, D));
    inputs.c.push_back(node.noise_bound);
    inputs.mu.push_back(node.mu);
  }

  BoundReport report = theorem1_bound_report(traces, inputs, constants,
                                             parse_tau_list(tau_text, cfg.horizon));

  std::printf("delta=%.6g lambda=%.6g D=%.6g p=%.6g sum||x0||_1=%.6g max||z||=%.6g\n",
              constants.delta, constants.lambda, inputs.D, inputs.p, report.x0_l1_sum,
              report.measured_max_norm);
  std::printf("%8s %14s %14s %14s %14s %14s %14s  %s\n", "tau", "lhs_mean", "lhs+2se",
              "rhs", "transient", "log_term", "noise_term", "ok");
  for (const auto& row : report.rows)
    std::printf("%8lld %14.6g %14.6g %14.6g %14.6g %14.6g %14.6g  %s\n",
                static_cast<long long>(row.tau), row.lhs_mean, row.lhs_conservative,
                row.rhs, row.term_transient, row.term_log, row.term_noise,
                row.satisfied ? "yes" : "NO");
  if (!report.all_satisfied) {
    std::printf("bound VIOLATED\n");
    return kExitValidation;
  }
  std::printf("bound satisfied at every tau\n");
  return kExitOk;
}

int cmd_fit(const std::string& trace_path, const std::string& metric, std::int64_t from,
            std::int64_t to, bool conservative) {
  TraceBundle traces = parse_csv(trace_path);
  FitResult fit = rate_fit(traces, metric, from, to, conservative);
  std::printf("metric %s over t in [%lld, %lld]%s: slope %.6g +/- %.3g, intercept "
              "%.6g, %d points\n",
              metric.c_str(), static_cast<long long>(from), static_cast<long long>(to),
              conservative ? " (mean+2SE)" : "", fit.slope, fit.slope_stderr,
              fit.intercept, fit.points);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic subgradient-push simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", run_args.config, "experiment config (JSON)")->required();
  run->add_option("--out", run_args.out_dir, "directory for the output CSV");
  auto* seed_opt = run->add_option("--seed", run_args.seed, "override master seed");
  run->add_option("--runs", run_args.runs, "override Monte Carlo run count");
  run->add_option("--horizon", run_args.horizon, "override step horizon");

  std::string vg_config;
  int vg_B = 1;
  std::int64_t vg_horizon = 0;
  auto* verify = app.add_subcommand("verify-graph",
                                    "check B-strong-connectivity of the sequence");
  verify->add_option("--config", vg_config, "experiment config (JSON)")->required();
  verify->add_option("--B", vg_B, "window length")->required();
  verify->add_option("--horizon", vg_horizon, "verification horizon")->required();

  std::string b_config, b_trace, b_tau;
  double b_D = 0.0;
  auto* bound = app.add_subcommand("bound", "evaluate the convergence bound");
  bound->add_option("--config", b_config, "experiment config (JSON)")->required();
  bound->add_option("--trace", b_trace, "trace CSV from `run`")->required();
  bound->add_option("--D", b_D, "iterate norm bound")->required();
  bound->add_option("--tau", b_tau, "comma-separated tau list (default 10,50,T-1)");

  std::string f_trace, f_metric;
  std::int64_t f_from = 0, f_to = 0;
  bool f_conservative = false;
  auto* fit = app.add_subcommand("fit", "log-log slope of a metric");
  fit->add_option("--trace", f_trace, "trace CSV")->required();
  fit->add_option("--metric", f_metric, "metric name")->required();
  fit->add_option("--from", f_from, "window start (inclusive)")->required();
  fit->add_option("--to", f_to, "window end (inclusive)")->required();
  fit->add_flag("--conservative", f_conservative, "fit mean + 2 SE instead of the mean");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      run_args.seed_set = seed_opt->count() > 0;
      return cmd_run(run_args);
    }
    if (verify->parsed()) return cmd_verify_graph(vg_config, vg_B, vg_horizon);
    if (bound->parsed()) return cmd_bound(b_config, b_trace, b_D, b_tau);
    if (fit->parsed()) return cmd_fit(f_trace, f_metric, f_from, f_to, f_conservative);
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitDivergence;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
