#include "gradpush/optimizer.hpp"

#include <cmath>

#include "gradpush/errors.hpp"

namespace gradpush {

StepSchedule theorem1_schedule(const std::vector<double>& mus) {
  if (mus.empty()) throw ValidationError("theorem1_schedule: empty mu list");
  double sum = 0.0;
  for (double mu : mus) {
    if (!(mu > 0.0)) throw ValidationError("theorem1_schedule: all mu_i must be positive");
    sum += mu;
  }
  return StepSchedule{4.0 * static_cast<double>(mus.size()) / sum};
}

std::vector<double> min_consensus(const std::vector<double>& values,
                                  const GraphSequence& seq, int steps) {
  if (steps < 1) throw ValidationError("min_consensus: steps must be >= 1");
  if (static_cast<int>(values.size()) != seq.node_count())
    throw ValidationError("min_consensus: value count does not match graph");
  std::vector<double> current = values;
  std::vector<double> next(values.size());
  for (int round = 0; round < steps; ++round) {
    DirectedGraph g = seq.at(static_cast<std::uint64_t>(round));
    for (int i = 0; i < seq.node_count(); ++i) {
      double m = current[i];
      for (int j : g.in_neighbors(i)) m = std::min(m, current[j]);
      next[i] = m;
    }
    current.swap(next);
  }
  return current;
}

StepSchedule conservative_p_from_min(const std::vector<double>& consensus_output, int n) {
  if (consensus_output.empty())
    throw ValidationError("conservative_p_from_min: empty input");
  double first = consensus_output.front();
  for (double v : consensus_output) {
    if (v != first)
      throw ValidationError("conservative_p_from_min: consensus has not converged");
  }
  if (!(first > 0.0))
    throw ValidationError("conservative_p_from_min: min mu must be positive");
  return StepSchedule{4.0 * static_cast<double>(n) / first * (1.0 + 1e-9)};
}

Eigen::VectorXd update_weighted_average(const Eigen::VectorXd& zhat,
                                        const Eigen::VectorXd& z_new, std::uint64_t t) {
  if (t == 0) throw ValidationError("update_weighted_average: t must be >= 1");
  double td = static_cast<double>(t);
  double S_t = td * (td - 1.0) / 2.0;
  double S_next = (td + 1.0) * td / 2.0;
  return (td * z_new + S_t * zhat) / S_next;
}

void sgp_step(OptimizerState& state, const MixingMatrix& A,
              const GradientOracle& oracle, const StepSchedule& schedule) {
  PushSumState& ps = state.push;
  const std::uint64_t t_old = ps.t;
  const std::uint64_t t_new = t_old + 1;
  const double alpha = schedule.alpha(t_new);

  ps.mix_with(A);

  // Exactly one oracle call per node, each at the freshly mixed ratio z.
  Eigen::MatrixXd& g = state.last_gradient;
  for (int i = 0; i < ps.node_count(); ++i)
    g.row(i) = oracle(i, ps.z.row(i).transpose(), t_new).transpose();

  ps.apply_perturbation((-alpha) * g);

  if (!ps.x.allFinite() || ps.x.cwiseAbs().maxCoeff() > 1e12)
    throw DivergenceError("sgp_step: iterates exceeded the divergence guard at t=" +
                          std::to_string(t_new));

  if (t_old >= 1) {
    for (int i = 0; i < ps.node_count(); ++i)
      state.zhat.row(i) =
          update_weighted_average(state.zhat.row(i).transpose(),
                                  ps.z.row(i).transpose(), t_old)
              .transpose();
  }
  // t_old == 0: zhat(1) stays z(0), the convention the averaging starts from.
}

}  // namespace gradpush
