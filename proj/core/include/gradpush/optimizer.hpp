#ifndef GRADPUSH_OPTIMIZER_HPP
#define GRADPUSH_OPTIMIZER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "gradpush/objectives.hpp"
#include "gradpush/pushsum.hpp"

namespace gradpush {

/// Decaying step size alpha(t) = p/t for t >= 1.
struct StepSchedule {
  double p = 1.0;

  double alpha(std::uint64_t t) const { return p / static_cast<double>(t); }
};

/// Smallest p with p * mean(mu) >= 4: p = 4n / sum(mu_i).
StepSchedule theorem1_schedule(const std::vector<double>& mus);

/// Distributed min: each round every node replaces its value with the
/// minimum over its in-neighbors' previous values. On a B-strongly-connected
/// sequence all nodes hold the global min after O(nB) rounds.
std::vector<double> min_consensus(const std::vector<double>& values,
                                  const GraphSequence& seq, int steps);

/// Conservative step constant from a converged min-consensus on the mu_i:
/// the smallest p with p * min(mu) / n strictly above 4, realized as
/// p = 4n / min(mu) * (1 + 1e-9). Rejects non-converged input.
StepSchedule conservative_p_from_min(const std::vector<double>& consensus_output, int n);

/// Weighted running average carrying S(t) = t(t-1)/2:
/// returns (t z_new + S(t) zhat) / S(t+1). Rejects t = 0.
Eigen::VectorXd update_weighted_average(const Eigen::VectorXd& zhat,
                                        const Eigen::VectorXd& z_new, std::uint64_t t);

/// Per-node noisy gradient oracle: (node, point, t) -> sampled gradient.
/// Implementations must be pure given (node, point, t) so node evaluation
/// order cannot matter.
using GradientOracle =
    std::function<Eigen::VectorXd(int node, const Eigen::VectorXd& point, std::uint64_t t)>;

/// Stochastic subgradient-push state: the underlying push-sum pair (x, y)
/// plus the weighted iterate averages zhat. zhat(1) = z(0) by convention.
struct OptimizerState {
  PushSumState push;
  Eigen::MatrixXd zhat;
  Eigen::MatrixXd last_gradient;  // g(t) sampled at z(t); zero before any step

  explicit OptimizerState(const Eigen::MatrixXd& x0)
      : push(x0),
        zhat(x0),
        last_gradient(Eigen::MatrixXd::Zero(x0.rows(), x0.cols())) {}

  std::uint64_t t() const { return push.t; }
  double weight_S() const {
    return static_cast<double>(push.t) * (static_cast<double>(push.t) - 1.0) / 2.0;
  }
};

/// One optimizer round: mix (w <- Ax, y <- Ay, z <- w/y), sample one noisy
/// gradient per node at the fresh z, descend (x <- w - alpha(t+1) g), then
/// fold z into the weighted averages. Identical to pushsum_step with
/// perturbation -alpha(t+1) g(t+1). Throws DivergenceError if any
/// coordinate leaves [-1e12, 1e12] or becomes non-finite.
void sgp_step(OptimizerState& state, const MixingMatrix& A,
              const GradientOracle& oracle, const StepSchedule& schedule);

}  // namespace gradpush

#endif
