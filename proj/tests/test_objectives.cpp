#include <cmath>

#include "doctest.h"
#include "gradpush/errors.hpp"
#include "gradpush/objectives.hpp"

using namespace gradpush;

TEST_SUITE_BEGIN("objectives");

namespace {

// f(theta) = p (theta - u)^2 as a 1-d quadratic: Q = [2p], b = [2pu], c = pu^2
ObjectiveSpec scalar_estimation_term(double p, double u, double noise_c = 0.0) {
  Eigen::MatrixXd Q(1, 1);
  Q << 2.0 * p;
  Eigen::VectorXd b(1);
  b << 2.0 * p * u;
  return general_quadratic(Q, b, p * u * u, noise_c);
}

Eigen::VectorXd point1(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("weighted-mean minimizers for hand-picked estimation problems") {
  // p=(1,1), u=(0,2): theta* = 1
  {
    auto f1 = scalar_estimation_term(1.0, 0.0);
    auto f2 = scalar_estimation_term(1.0, 2.0);
    double g = f1.gradient(point1(1.0))(0) + f2.gradient(point1(1.0))(0);
    CHECK(std::abs(g) < 1e-12);
  }
  // p=(1,3), u=(0,4): theta* = (1*0 + 3*4)/4 = 3
  {
    auto f1 = scalar_estimation_term(1.0, 0.0);
    auto f2 = scalar_estimation_term(3.0, 4.0);
    double g = f1.gradient(point1(3.0))(0) + f2.gradient(point1(3.0))(0);
    CHECK(std::abs(g) < 1e-12);
    // off the minimizer the gradient is nonzero
    CHECK(std::abs(f1.gradient(point1(2.0))(0) + f2.gradient(point1(2.0))(0)) > 1.0);
  }
}

TEST_CASE("estimation preset: minimizer is the p-weighted mean of the u_i") {
  NetworkObjective net = quadratic_estimation_preset(40, 7u, 0.5);
  double p_sum = 0.0, pu_sum = 0.0;
  for (const auto& f : net.nodes) {
    double p = f.mu / 2.0;
    double u = (*f.minimizer)(0);
    CHECK(p >= 1e-6);
    CHECK(p < 1.0);
    CHECK(*f.lipschitz == doctest::Approx(f.mu));
    p_sum += p;
    pu_sum += p * u;
  }
  CHECK(net.minimizer(0) == doctest::Approx(pu_sum / p_sum).epsilon(1e-12));
  // first-order optimality at theta*
  CHECK(std::abs(net.gradient_sum(net.minimizer)(0)) <= 1e-10);
  // stable gap equals the naive difference where the naive form is accurate
  Eigen::VectorXd probe = point1(net.minimizer(0) + 0.37);
  double naive = net.value(probe) - net.value(net.minimizer);
  CHECK(net.gap(probe) == doctest::Approx(naive).epsilon(1e-9));

  // n=1: theta* = u_1
  NetworkObjective solo = quadratic_estimation_preset(1, 3u);
  CHECK(solo.minimizer(0) == doctest::Approx((*solo.nodes[0].minimizer)(0)));
}

TEST_CASE("general_quadratic: descriptors and minimizer") {
  {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    ObjectiveSpec f = general_quadratic(Q, Eigen::VectorXd::Zero(2), 0.0);
    CHECK(f.mu == doctest::Approx(1.0));
    CHECK(*f.lipschitz == doctest::Approx(1.0));
    CHECK(f.minimizer->norm() < 1e-12);
  }
  {
    Eigen::MatrixXd Q(2, 2);
    Q << 1, 0, 0, 4;
    Eigen::VectorXd b(2);
    b << 1, 4;
    ObjectiveSpec f = general_quadratic(Q, b, 0.0);
    CHECK(f.mu == doctest::Approx(1.0));
    CHECK(*f.lipschitz == doctest::Approx(4.0));
    CHECK((*f.minimizer - Eigen::VectorXd::Ones(2)).norm() < 1e-12);
    // exact Taylor step: f(min + e1) - f(min) = Q11/2
    Eigen::VectorXd shifted = *f.minimizer + Eigen::VectorXd::Unit(2, 0);
    CHECK(f.value(shifted) - f.value(*f.minimizer) == doctest::Approx(0.5 * Q(0, 0)));
  }
}

TEST_CASE("general_quadratic rejects bad matrices") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(general_quadratic(asym, Eigen::VectorXd::Zero(2), 0.0),
                  ValidationError);
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(general_quadratic(indef, Eigen::VectorXd::Zero(2), 0.0),
                  ValidationError);
  Eigen::MatrixXd tiny(2, 2);
  tiny << 1, 0, 0, 1e-12;
  CHECK_THROWS_AS(general_quadratic(tiny, Eigen::VectorXd::Zero(2), 0.0),
                  ValidationError);
}

TEST_CASE("noisy gradient: noiseless case is exact, noise is hard-bounded") {
  ObjectiveSpec f = scalar_estimation_term(0.8, 1.5);
  Rng rng(42u);
  GradientSample s = noisy_gradient(f, point1(0.3), rng);
  CHECK(s.value(0) == s.true_grad(0));
  CHECK(s.noise(0) == 0.0);

  ObjectiveSpec noisy = scalar_estimation_term(0.8, 1.5, 0.6);
  for (int law = 0; law < 2; ++law) {
    NoiseLaw l = law == 0 ? NoiseLaw::uniform_ball : NoiseLaw::gaussian_rejection;
    for (int i = 0; i < 5000; ++i) {
      GradientSample sample = noisy_gradient(noisy, point1(-0.7), rng, l);
      REQUIRE(sample.noise.norm() <= 0.6 + 1e-15);
      REQUIRE((sample.value - (sample.true_grad + sample.noise)).norm() == 0.0);
    }
  }
}

TEST_CASE("noisy gradient: empirical mean matches the true gradient") {
  Eigen::MatrixXd Q(2, 2);
  Q << 2, 0.3, 0.3, 1;
  Eigen::VectorXd b(2);
  b << 0.5, -1;
  ObjectiveSpec f = general_quadratic(Q, b, 0.0, 0.9);
  Eigen::VectorXd at(2);
  at << 0.4, -0.2;
  Eigen::VectorXd truth = f.gradient(at);

  Rng rng(1234u);
  const int N = 40000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd noise = noisy_gradient(f, at, rng).noise;
    sum += noise;
    sq += noise.cwiseProduct(noise);
  }
  for (int k = 0; k < 2; ++k) {
    double mean = sum(k) / N;
    double sd = std::sqrt((sq(k) - N * mean * mean) / (N - 1));
    CHECK(std::abs(mean) <= 4.0 * sd / std::sqrt(static_cast<double>(N)));
  }
  (void)truth;
}

TEST_CASE("certify_assumptions: exact quadratic passes with zero slack") {
  ObjectiveSpec f =
      general_quadratic(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0);
  Rng rng(9u);
  AssumptionReport report = certify_assumptions(f, 300, 2.0, rng);
  CHECK(report.passed);
  CHECK(report.violations.empty());
  // for Q = I the strong-convexity inequality is met with equality
  CHECK(std::abs(report.worst_strong_convexity_slack) < 1e-12);
  CHECK(report.max_fd_rel_error <= 1e-5);
}

TEST_CASE("certify_assumptions flags an overstated mu") {
  ObjectiveSpec f =
      general_quadratic(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0);
  f.mu *= 2.0;  // claim twice the true curvature
  Rng rng(10u);
  AssumptionReport report = certify_assumptions(f, 300, 2.0, rng);
  CHECK_FALSE(report.passed);
  CHECK(report.worst_strong_convexity_slack < 0.0);
  CHECK(!report.violations.empty());
  CHECK(report.violations.front().kind == "strong_convexity");
}

TEST_CASE("certify_assumptions: finite differences vs the preset gradient") {
  NetworkObjective net = quadratic_estimation_preset(5, 11u);
  Rng rng(12u);
  for (const auto& node : net.nodes) {
    AssumptionReport report = certify_assumptions(node, 100, 3.0, rng);
    CHECK(report.passed);
    CHECK(report.max_fd_rel_error <= 1e-5);
  }
}

TEST_CASE("subgradient fixture: tie-break at the kink and strong convexity") {
  ObjectiveSpec f = subgradient_fixture(0.5, 2);
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  CHECK(f.gradient(origin).norm() == 0.0);  // chosen subgradient at z1 = 0
  CHECK(f.value(origin) == 0.0);

  Eigen::VectorXd pos(2), neg(2);
  pos << 2.0, 1.0;
  neg << -2.0, 1.0;
  CHECK(f.gradient(pos)(0) == doctest::Approx(0.5 * 2.0 + 1.0));
  CHECK(f.gradient(neg)(0) == doctest::Approx(-0.5 * 2.0 - 1.0));

  // subgradient inequality with modulus mu on a few concrete pairs
  Rng rng(33u);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd x = rng.uniform_ball(2, 3.0);
    Eigen::VectorXd y = rng.uniform_ball(2, 3.0);
    double lhs = f.value(x) - f.value(y);
    double rhs = f.gradient(y).dot(x - y) + 0.5 * f.mu * (x - y).squaredNorm();
    CHECK(lhs >= rhs - 1e-12);
  }
}

TEST_CASE("gradient norm bound on a ball dominates sampled gradients") {
  NetworkObjective net = random_quadratic_network(4, 3, 21u, 0.5, 3.0);
  const double D = 2.5;
  Rng rng(77u);
  for (const auto& node : net.nodes) {
    double L = gradient_norm_bound_on_ball(node, D);
    for (int k = 0; k < 300; ++k) {
      Eigen::VectorXd z = rng.uniform_ball(3, D);
      CHECK(node.gradient(z).norm() <= L * (1.0 + 1e-12));
    }
  }
  ObjectiveSpec no_lipschitz = subgradient_fixture(1.0, 2);
  CHECK_THROWS_AS(gradient_norm_bound_on_ball(no_lipschitz, 1.0), ValidationError);
}

TEST_CASE("random quadratic network: optimality and stable gap") {
  NetworkObjective net = random_quadratic_network(6, 3, 5u, 0.5, 4.0);
  CHECK(net.gradient_sum(net.minimizer).norm() <= 1e-10);
  Rng rng(6u);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd z = net.minimizer + rng.uniform_ball(3, 1.0);
    double naive = net.value(z) - net.value(net.minimizer);
    CHECK(net.gap(z) == doctest::Approx(naive).epsilon(1e-8));
    CHECK(net.gap(z) >= 0.0);
  }
}

TEST_SUITE_END();
