#ifndef GRADPUSH_HARNESS_HPP
#define GRADPUSH_HARNESS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gradpush/config.hpp"
#include "gradpush/graph.hpp"
#include "gradpush/mixing.hpp"
#include "gradpush/objectives.hpp"
#include "gradpush/optimizer.hpp"
#include "gradpush/trace.hpp"

namespace gradpush {

// Substream tags: every consumer of randomness inside a run derives its
// stream from (master seed, run index, tag), so runs are independent and
// any one of them is replayable in isolation.
namespace seed_tag {
constexpr std::uint64_t graph = 1;
constexpr std::uint64_t objective = 2;
constexpr std::uint64_t init = 3;
constexpr std::uint64_t noise = 4;
constexpr std::uint64_t sample = 5;
}  // namespace seed_tag

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t tag);

GraphSequence build_graph_sequence(const GraphConfig& graph, int n,
                                   std::uint64_t graph_seed);

NetworkObjective build_objective(const ObjectiveConfig& objective, int n, int d,
                                 std::uint64_t objective_seed);

Eigen::MatrixXd build_initial_points(const InitConfig& init, int n, int d,
                                     std::uint64_t init_seed);

StepSchedule build_schedule(const ScheduleConfig& schedule, const NetworkObjective& obj,
                            const GraphSequence& seq, int B);

/// Nodes whose per-node metrics are logged; explicit list from the config,
/// otherwise sample_count distinct nodes drawn from the master seed.
std::vector<int> select_sample_nodes(const ExperimentConfig& cfg);

/// Executes cfg.runs independent runs (in parallel; output is merge-sorted
/// so scheduling cannot change bytes). A diverging run is flagged and
/// truncated, not fatal. Every emitted byte is a function of the config.
TraceBundle run_experiment(const ExperimentConfig& cfg);

/// Log-log least-squares fit ln(value) = intercept + slope * ln(t).
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

/// Fit over explicit (t, value) pairs; values must be positive.
FitResult rate_fit(const std::vector<std::pair<double, double>>& series);

/// Fit over the per-t Monte Carlo aggregate of a metric in [from, to].
/// The aggregate is the mean over runs and nodes; with `conservative` it is
/// mean + 2 * standard error. Throws ValidationError on a non-positive
/// aggregate inside the window.
FitResult rate_fit(const TraceBundle& traces, const std::string& metric,
                   std::int64_t from, std::int64_t to, bool conservative = false);

struct BoundInputs {
  double D = 0.0;              // iterate norm bound; must dominate the trace
  std::vector<double> L;       // per-node gradient norm bound on the D-ball
  std::vector<double> c;       // per-node noise bounds
  std::vector<double> mu;      // per-node strong convexity moduli
  double p = 0.0;              // step constant
  int d = 1;                   // problem dimension
};

struct BoundReportRow {
  std::int64_t tau = 0;
  double lhs_mean = 0.0;       // worst node's Monte Carlo mean
  double lhs_se = 0.0;         // its standard error
  double lhs_conservative = 0.0;  // mean + 2 SE
  double term_transient = 0.0;    // (80 L / (tau delta)) lambda/(1-lambda) sum||x0||_1
  double term_log = 0.0;          // (80 p L n max_j B_j / (tau delta (1-lambda))) (1+ln(tau-1))
  double term_noise = 0.0;        // (p/tau) sum (L_j+c_j)^2
  double rhs = 0.0;
  bool satisfied = false;
};

struct BoundReport {
  BoundInputs inputs;
  SpectralConstants constants;
  double x0_l1_sum = 0.0;      // max over runs of sum_j ||x_j(0)||_1
  double measured_max_norm = 0.0;
  std::vector<BoundReportRow> rows;
  bool all_satisfied = true;
};

/// Evaluates the convergence bound's right-hand side at each tau and
/// compares it against the Monte Carlo estimate of the left-hand side
/// (metric "thm1_lhs"; the conservative mean + 2 SE is used, maximized over
/// nodes). Refuses inputs with D below the measured max iterate norm.
BoundReport theorem1_bound_report(const TraceBundle& traces, const BoundInputs& inputs,
                                  const SpectralConstants& constants,
                                  const std::vector<std::int64_t>& tau_list);

/// Right-hand side of the bound alone (three terms summed).
double theorem1_rhs(const BoundInputs& inputs, const SpectralConstants& constants,
                    double x0_l1_sum, std::int64_t tau);

/// Tracks the running max of a scalar series and certifies it plateaus:
/// after the burn-in fraction of observations, growth stays below rel_tol.
class BoundednessMonitor {
public:
  void observe(double value);
  double running_max() const { return history_.empty() ? 0.0 : history_.back(); }
  const std::vector<double>& history() const { return history_; }
  bool plateaued(double burn_in_fraction, double rel_tol) const;

private:
  std::vector<double> history_;
};

}  // namespace gradpush

#endif
