#include "gradpush/objectives.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gradpush/errors.hpp"

namespace gradpush {

double NetworkObjective::value(const Eigen::VectorXd& z) const {
  double sum = 0.0;
  for (const auto& f : nodes) sum += f.value(z);
  return sum;
}

Eigen::VectorXd NetworkObjective::gradient_sum(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  for (const auto& f : nodes) g += f.gradient(z);
  return g;
}

std::vector<double> NetworkObjective::mus() const {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& f : nodes) out.push_back(f.mu);
  return out;
}

GradientSample noisy_gradient(const ObjectiveSpec& spec, const Eigen::VectorXd& u,
                              Rng& rng, NoiseLaw law) {
  GradientSample s;
  s.true_grad = spec.gradient(u);
  double c = spec.noise_bound;
  if (c <= 0.0) {
    s.noise = Eigen::VectorXd::Zero(spec.dim);
    s.value = s.true_grad;
    return s;
  }
  switch (law) {
    case NoiseLaw::uniform_ball:
      s.noise = rng.uniform_ball(spec.dim, c);
      break;
    case NoiseLaw::gaussian_rejection: {
      double sigma = c / 3.0;
      Eigen::VectorXd n;
      do {
        n = sigma * rng.normal_vector(spec.dim);
      } while (n.norm() > c);
      s.noise = n;
      break;
    }
  }
  s.value = s.true_grad + s.noise;
  return s;
}

NetworkObjective quadratic_estimation_preset(int n, std::uint64_t seed,
                                             double theta_hat, double noise_c) {
  if (n < 1) throw ValidationError("quadratic_estimation_preset: n must be >= 1");
  Rng rng{seed, 0x0B1Ecull};
  Eigen::VectorXd p(n), u(n);
  for (int i = 0; i < n; ++i) {
    double pi = rng.uniform01();
    while (pi < 1e-6) pi = rng.uniform01();  // keep Var(w_i) = 1/p_i finite
    p(i) = pi;
    u(i) = theta_hat + rng.normal() / std::sqrt(pi);
  }

  NetworkObjective net;
  net.nodes.reserve(n);
  for (int i = 0; i < n; ++i) {
    ObjectiveSpec f;
    f.dim = 1;
    double pi = p(i), ui = u(i);
    f.value = [pi, ui](const Eigen::VectorXd& z) {
      double diff = z(0) - ui;
      return pi * diff * diff;
    };
    f.gradient = [pi, ui](const Eigen::VectorXd& z) {
      Eigen::VectorXd g(1);
      g(0) = 2.0 * pi * (z(0) - ui);
      return g;
    };
    f.mu = 2.0 * pi;
    f.lipschitz = 2.0 * pi;
    f.noise_bound = noise_c;
    f.minimizer = Eigen::VectorXd::Constant(1, ui);
    net.nodes.push_back(std::move(f));
  }

  double p_sum = p.sum();
  double theta_star = p.dot(u) / p_sum;
  net.minimizer = Eigen::VectorXd::Constant(1, theta_star);
  // F(theta) - F(theta*) = sum(p_i) (theta - theta*)^2, exactly.
  net.gap = [p_sum, theta_star](const Eigen::VectorXd& z) {
    double diff = z(0) - theta_star;
    return p_sum * diff * diff;
  };
  return net;
}

ObjectiveSpec general_quadratic(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                double c, double noise_c) {
  const int d = static_cast<int>(Q.rows());
  if (Q.cols() != d || b.size() != d)
    throw ValidationError("general_quadratic: dimension mismatch");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("general_quadratic: Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
  double lambda_min = eig.eigenvalues().minCoeff();
  if (lambda_min <= 1e-10)
    throw ValidationError("general_quadratic: Q is not positive definite");

  ObjectiveSpec f;
  f.dim = d;
  f.value = [Q, b, c](const Eigen::VectorXd& z) {
    return 0.5 * z.dot(Q * z) - b.dot(z) + c;
  };
  f.gradient = [Q, b](const Eigen::VectorXd& z) -> Eigen::VectorXd { return Q * z - b; };
  f.mu = lambda_min;
  f.lipschitz = eig.eigenvalues().maxCoeff();
  f.noise_bound = noise_c;
  f.minimizer = Q.ldlt().solve(b);
  return f;
}

NetworkObjective random_quadratic_network(int n, int d, std::uint64_t seed,
                                          double mu_lo, double mu_hi, double noise_c) {
  if (n < 1 || d < 1) throw ValidationError("random_quadratic_network: bad sizes");
  if (!(mu_lo > 0.0) || mu_hi < mu_lo)
    throw ValidationError("random_quadratic_network: need 0 < mu_lo <= mu_hi");
  Rng rng{seed, 0x0Badull};

  NetworkObjective net;
  net.nodes.reserve(n);
  Eigen::MatrixXd Q_total = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b_total = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd eigenvalues(d);
    for (int k = 0; k < d; ++k)
      eigenvalues(k) = mu_lo + (mu_hi - mu_lo) * rng.uniform01();
    Eigen::MatrixXd gauss(d, d);
    for (int r = 0; r < d; ++r) gauss.row(r) = rng.normal_vector(d).transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd R = qr.householderQ();
    Eigen::MatrixXd Q = R * eigenvalues.asDiagonal() * R.transpose();
    Q = 0.5 * (Q + Q.transpose());  // symmetrize away roundoff
    Eigen::VectorXd target = rng.normal_vector(d);
    Eigen::VectorXd b = Q * target;
    Q_total += Q;
    b_total += b;
    net.nodes.push_back(general_quadratic(Q, b, 0.0, noise_c));
  }
  net.minimizer = Q_total.ldlt().solve(b_total);
  Eigen::VectorXd z_star = net.minimizer;
  // F is quadratic with Hessian Q_total, so the gap is exact in z - z*.
  net.gap = [Q_total, z_star](const Eigen::VectorXd& z) {
    Eigen::VectorXd diff = z - z_star;
    return 0.5 * diff.dot(Q_total * diff);
  };
  return net;
}

ObjectiveSpec subgradient_fixture(double mu, int d, double noise_c) {
  if (!(mu > 0.0) || d < 1) throw ValidationError("subgradient_fixture: bad parameters");
  ObjectiveSpec f;
  f.dim = d;
  f.value = [mu](const Eigen::VectorXd& z) {
    return 0.5 * mu * z.squaredNorm() + std::abs(z(0));
  };
  f.gradient = [mu](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    Eigen::VectorXd g = mu * z;
    if (z(0) > 0.0)
      g(0) += 1.0;
    else if (z(0) < 0.0)
      g(0) -= 1.0;
    // at z_1 == 0 the chosen subgradient component is 0
    return g;
  };
  f.mu = mu;
  f.noise_bound = noise_c;
  f.minimizer = Eigen::VectorXd::Zero(d);
  return f;
}

double gradient_norm_bound_on_ball(const ObjectiveSpec& spec, double D) {
  if (D < 0.0) throw ValidationError("gradient_norm_bound_on_ball: D must be >= 0");
  if (!spec.lipschitz)
    throw ValidationError("gradient_norm_bound_on_ball: spec has no Lipschitz constant");
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(spec.dim);
  return spec.gradient(origin).norm() + *spec.lipschitz * D;
}

namespace {

void record_violation(AssumptionReport& report, const std::string& kind,
                      const Eigen::VectorXd& x, const Eigen::VectorXd& y, double slack) {
  report.passed = false;
  if (report.violations.size() < 8) report.violations.push_back({kind, x, y, slack});
}

}  // namespace

AssumptionReport certify_assumptions(const ObjectiveSpec& spec, int trials,
                                     double radius, Rng& rng) {
  if (trials < 1) throw ValidationError("certify_assumptions: trials must be >= 1");
  AssumptionReport report;
  report.trials = trials;
  report.worst_strong_convexity_slack = std::numeric_limits<double>::infinity();
  report.worst_lipschitz_slack = std::numeric_limits<double>::infinity();

  for (int k = 0; k < trials; ++k) {
    Eigen::VectorXd x = rng.uniform_ball(spec.dim, radius);
    Eigen::VectorXd y = rng.uniform_ball(spec.dim, radius);

    double fx = spec.value(x);
    double fy = spec.value(y);
    Eigen::VectorXd gy = spec.gradient(y);
    double scale = std::max({1.0, std::abs(fx), std::abs(fy)});
    double sc_slack =
        fx - fy - gy.dot(x - y) - 0.5 * spec.mu * (x - y).squaredNorm();
    report.worst_strong_convexity_slack =
        std::min(report.worst_strong_convexity_slack, sc_slack);
    if (sc_slack < -1e-9 * scale)
      record_violation(report, "strong_convexity", x, y, sc_slack);

    if (spec.lipschitz) {
      Eigen::VectorXd gx = spec.gradient(x);
      double lip_slack = *spec.lipschitz * (x - y).norm() - (gx - gy).norm();
      report.worst_lipschitz_slack = std::min(report.worst_lipschitz_slack, lip_slack);
      if (lip_slack < -1e-9 * std::max(1.0, gx.norm() + gy.norm()))
        record_violation(report, "lipschitz", x, y, lip_slack);
    }

    // central finite differences, step 1e-6
    Eigen::VectorXd g = spec.gradient(x);
    Eigen::VectorXd fd(spec.dim);
    const double h = 1e-6;
    for (int c = 0; c < spec.dim; ++c) {
      Eigen::VectorXd hi = x, lo = x;
      hi(c) += h;
      lo(c) -= h;
      fd(c) = (spec.value(hi) - spec.value(lo)) / (2.0 * h);
    }
    double rel = (fd - g).norm() / std::max(1.0, g.norm());
    report.max_fd_rel_error = std::max(report.max_fd_rel_error, rel);
    if (rel > 1e-5) record_violation(report, "finite_difference", x, x, rel);
  }
  return report;
}

}  // namespace gradpush
