#ifndef GRADPUSH_PUSHSUM_HPP
#define GRADPUSH_PUSHSUM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gradpush/mixing.hpp"

namespace gradpush {

/// State of the perturbed push-sum recursion. Values are stored one node per
/// row (n x d), weights y as a positive n-vector that always sums to n.
/// The ratio z = w / y tracks the running network average of x.
struct PushSumState {
  Eigen::MatrixXd x;  // node values
  Eigen::VectorXd y;  // push-sum weights, y(0) = 1
  Eigen::MatrixXd w;  // mixed values A x
  Eigen::MatrixXd z;  // ratio estimates w_i / y_i
  std::uint64_t t = 0;

  PushSumState(const Eigen::MatrixXd& x0);

  int node_count() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }

  /// Mixing half-step: w <- A x, y <- A y, z_i <- w_i / y_i, t <- t+1.
  /// Throws NumericalError if any weight underflows below 1e-300.
  void mix_with(const MixingMatrix& A);

  /// Completes the step: x <- w + perturbation.
  void apply_perturbation(const Eigen::MatrixXd& perturbation);
};

/// One full round of perturbed push-sum:
///   w <- A x, y <- A y, z <- w/y, x <- w + perturbation.
void pushsum_step(PushSumState& state, const MixingMatrix& A,
                  const Eigen::MatrixXd& perturbation);

/// max_i || z_i - (sum_j x_j)/n ||_2 over the current state.
double consensus_residual(const PushSumState& state);

/// max_i || z_i - reference ||_2; the reference is typically the average of
/// x *before* the latest step, which is the exact quantity the per-step
/// disagreement bound controls.
double max_deviation_from(const Eigen::MatrixXd& z, const Eigen::VectorXd& reference);

/// Per-step disagreement bound:
///   (8/delta) * (lambda^t ||x(0)||_1 + sum_{s=1..t} lambda^{t-s} ||eps(s)||_1),
/// where ||eps(s)||_1 sums entrywise 1-norms over all nodes and
/// perturb_l1_history[s-1] holds it for step s. Requires t >= 1 and
/// history covering steps 1..t.
double lemma1_bound(double x0_l1, const std::vector<double>& perturb_l1_history,
                    const SpectralConstants& constants, std::uint64_t t);

/// Closed-form cumulative bound for perturbations with E||e_i(t)||_1 <= D/t:
///   (8/delta) * lambda/(1-lambda) * x0_l1_sum
///     + (8/delta) * D*n/(1-lambda) * (1 + ln tau).
double corollary2_cumulative_bound(double x0_l1_sum, double D, int n,
                                   const SpectralConstants& constants, double tau);

/// Evaluated per-step bounds along one trajectory plus their running sum.
struct DisagreementBound {
  std::vector<double> per_step;  // bound for steps t = 1..T
  double cumulative = 0.0;

  static DisagreementBound evaluate(double x0_l1,
                                    const std::vector<double>& perturb_l1_history,
                                    const SpectralConstants& constants);
};

}  // namespace gradpush

#endif
