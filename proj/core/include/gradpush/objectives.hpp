#ifndef GRADPUSH_OBJECTIVES_HPP
#define GRADPUSH_OBJECTIVES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gradpush/rng.hpp"

namespace gradpush {

/// One node's strongly convex objective: callable value/gradient plus the
/// descriptors the convergence theory consumes. For non-differentiable
/// fixtures `gradient` returns a chosen subgradient and `lipschitz` is unset.
struct ObjectiveSpec {
  int dim = 1;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double mu = 0.0;                      // strong-convexity modulus, > 0
  std::optional<double> lipschitz;      // gradient Lipschitz constant M
  double noise_bound = 0.0;             // hard cap c on the oracle noise norm
  std::optional<Eigen::VectorXd> minimizer;
};

/// Network of per-node objectives with the global minimizer of F = sum f_i.
/// `gap` evaluates F(z) - F(z*); presets install a cancellation-free form
/// (for quadratics the gap is an exact quadratic in z - z*).
struct NetworkObjective {
  std::vector<ObjectiveSpec> nodes;
  Eigen::VectorXd minimizer;
  std::function<double(const Eigen::VectorXd&)> gap;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int dim() const { return static_cast<int>(minimizer.size()); }
  double value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient_sum(const Eigen::VectorXd& z) const;
  std::vector<double> mus() const;
};

/// A noisy oracle draw: value = true_grad + noise, ||noise|| <= c almost
/// surely and E[noise] = 0.
struct GradientSample {
  Eigen::VectorXd value;
  Eigen::VectorXd true_grad;
  Eigen::VectorXd noise;
};

enum class NoiseLaw { uniform_ball, gaussian_rejection };

/// Samples the noisy gradient at u. uniform_ball draws noise uniformly on
/// the radius-c ball (d=1: uniform on [-c, c]); gaussian_rejection draws
/// N(0, (c/3)^2 I) conditioned on the ball, zero-mean by symmetry.
GradientSample noisy_gradient(const ObjectiveSpec& spec, const Eigen::VectorXd& u,
                              Rng& rng, NoiseLaw law = NoiseLaw::uniform_ball);

/// Distributed estimation preset: f_i(theta) = p_i (theta - u_i)^2 with
/// p_i ~ Uniform(0,1) (resampled below 1e-6) and u_i = theta_hat + w_i,
/// w_i ~ N(0, 1/p_i). Global minimizer is the weighted mean
/// sum(p_i u_i)/sum(p_i); mu_i = M_i = 2 p_i. `noise_c` adds an optional
/// bounded gradient-noise overlay (the preset's randomness otherwise lives
/// in the measurements u_i).
NetworkObjective quadratic_estimation_preset(int n, std::uint64_t seed,
                                             double theta_hat = 0.0,
                                             double noise_c = 0.0);

/// f(z) = 1/2 z'Qz - b'z + c for symmetric positive definite Q.
/// mu = lambda_min(Q), M = lambda_max(Q), minimizer solves Qz = b.
/// Rejects non-SPD Q (eigenvalue tolerance 1e-10).
ObjectiveSpec general_quadratic(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                double c, double noise_c = 0.0);

/// Network of n random SPD quadratics in dimension d with eigenvalues in
/// [mu_lo, mu_hi] and N(0,1) per-node minimizers. Exact global minimizer
/// via the pooled normal equations.
NetworkObjective random_quadratic_network(int n, int d, std::uint64_t seed,
                                          double mu_lo, double mu_hi,
                                          double noise_c = 0.0);

/// Non-differentiable fixture f(z) = mu/2 ||z||^2 + |z_1| exercising the
/// subgradient path; the subgradient at z_1 = 0 is taken as 0.
ObjectiveSpec subgradient_fixture(double mu, int d, double noise_c = 0.0);

/// Upper bound on max ||grad f(z)|| over the ball ||z|| <= D:
/// ||grad f(0)|| + M D. Requires the Lipschitz constant.
double gradient_norm_bound_on_ball(const ObjectiveSpec& spec, double D);

struct AssumptionViolation {
  std::string kind;  // "strong_convexity" | "lipschitz" | "finite_difference"
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double slack;
};

/// Sampled certificate for the strong-convexity and Lipschitz-gradient
/// inequalities plus a central finite-difference cross-check of the
/// gradient (step 1e-6, relative agreement 1e-5).
struct AssumptionReport {
  int trials = 0;
  double worst_strong_convexity_slack = 0.0;  // negative means violated
  double worst_lipschitz_slack = 0.0;         // negative means violated
  double max_fd_rel_error = 0.0;
  std::vector<AssumptionViolation> violations;  // capped at 8 entries
  bool passed = true;
};

AssumptionReport certify_assumptions(const ObjectiveSpec& spec, int trials,
                                     double radius, Rng& rng);

}  // namespace gradpush

#endif
