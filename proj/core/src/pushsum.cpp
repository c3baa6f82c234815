#include "gradpush/pushsum.hpp"

#include <cmath>

#include "gradpush/errors.hpp"

namespace gradpush {

PushSumState::PushSumState(const Eigen::MatrixXd& x0)
    : x(x0), y(Eigen::VectorXd::Ones(x0.rows())), w(x0), z(x0), t(0) {
  if (x0.rows() < 1 || x0.cols() < 1)
    throw ValidationError("PushSumState: x0 must be a nonempty n x d matrix");
}

void PushSumState::mix_with(const MixingMatrix& A) {
  if (A.size() != node_count())
    throw ValidationError("pushsum: mixing matrix size does not match state");
  w = A.entries * x;
  y = A.entries * y;
  for (int i = 0; i < node_count(); ++i) {
    if (!(y(i) >= 1e-300))
      throw NumericalError("pushsum: weight y underflow at node " + std::to_string(i));
    z.row(i) = w.row(i) / y(i);
  }
  ++t;
}

void PushSumState::apply_perturbation(const Eigen::MatrixXd& perturbation) {
  x = w + perturbation;
}

void pushsum_step(PushSumState& state, const MixingMatrix& A,
                  const Eigen::MatrixXd& perturbation) {
  if (perturbation.rows() != state.x.rows() || perturbation.cols() != state.x.cols())
    throw ValidationError("pushsum: perturbation shape does not match state");
  state.mix_with(A);
  state.apply_perturbation(perturbation);
}

double consensus_residual(const PushSumState& state) {
  Eigen::VectorXd mean = state.x.colwise().mean().transpose();
  return max_deviation_from(state.z, mean);
}

double max_deviation_from(const Eigen::MatrixXd& z, const Eigen::VectorXd& reference) {
  double worst = 0.0;
  for (int i = 0; i < z.rows(); ++i)
    worst = std::max(worst, (z.row(i).transpose() - reference).norm());
  return worst;
}

double lemma1_bound(double x0_l1, const std::vector<double>& perturb_l1_history,
                    const SpectralConstants& constants, std::uint64_t t) {
  if (t < 1) throw ValidationError("lemma1_bound: t must be >= 1");
  if (perturb_l1_history.size() < t)
    throw ValidationError("lemma1_bound: history does not cover steps 1..t");
  double lambda = constants.lambda;
  // Accumulate sum_{s=1..t} lambda^{t-s} ||eps(s)||_1 from the most recent
  // step backwards; lambda^0 is 1 even when lambda = 0.
  double acc = 0.0;
  for (std::uint64_t s = t; s >= 1; --s) {
    acc += perturb_l1_history[s - 1] * std::pow(lambda, static_cast<double>(t - s));
  }
  return (8.0 / constants.delta) * (std::pow(lambda, static_cast<double>(t)) * x0_l1 + acc);
}

double corollary2_cumulative_bound(double x0_l1_sum, double D, int n,
                                   const SpectralConstants& constants, double tau) {
  if (tau < 1.0) throw ValidationError("corollary2_cumulative_bound: tau must be >= 1");
  double lambda = constants.lambda;
  double delta = constants.delta;
  double transient = (8.0 / delta) * lambda / (1.0 - lambda) * x0_l1_sum;
  double harmonic =
      (8.0 / delta) * D * static_cast<double>(n) / (1.0 - lambda) * (1.0 + std::log(tau));
  return transient + harmonic;
}

DisagreementBound DisagreementBound::evaluate(
    double x0_l1, const std::vector<double>& perturb_l1_history,
    const SpectralConstants& constants) {
  DisagreementBound out;
  out.per_step.reserve(perturb_l1_history.size());
  double lambda = constants.lambda;
  // Incremental form: bound(t) = lambda * bound(t-1) + (8/delta) eps_l1(t).
  double carry = (8.0 / constants.delta) * x0_l1;
  for (double eps_l1 : perturb_l1_history) {
    carry = lambda * carry + (8.0 / constants.delta) * eps_l1;
    out.per_step.push_back(carry);
    out.cumulative += carry;
  }
  return out;
}

}  // namespace gradpush
