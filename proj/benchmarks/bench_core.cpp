#include <benchmark/benchmark.h>

#include "gradpush/harness.hpp"
#include "gradpush/pushsum.hpp"
#include "gradpush/rng.hpp"

using namespace gradpush;

namespace {

Eigen::MatrixXd gaussian_points(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) x.row(i) = rng.normal_vector(d).transpose();
  return x;
}

void BM_generate_cycle_plus_random(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GraphSequence seq = generate_cycle_plus_random(n, 1u);
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(seq.at(t++));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_generate_cycle_plus_random)->Arg(100)->Arg(1000);

void BM_build_mixing_matrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GraphSequence seq = generate_cycle_plus_random(n, 2u);
  DirectedGraph g = seq.at(0);
  for (auto _ : state) benchmark::DoNotOptimize(build_mixing_matrix(g));
}
BENCHMARK(BM_build_mixing_matrix)->Arg(100)->Arg(1000);

void BM_pushsum_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MixingMatrix A = build_mixing_matrix(generate_cycle_plus_random(n, 3u).at(0));
  PushSumState ps(gaussian_points(n, 1, 4u));
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(n, 1);
  for (auto _ : state) pushsum_step(ps, A, eps);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_pushsum_step)->Arg(100)->Arg(1000);

void BM_sgp_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NetworkObjective net = quadratic_estimation_preset(n, 5u, 0.0, 1.0);
  MixingMatrix A = build_mixing_matrix(generate_cycle_plus_random(n, 6u).at(0));
  StepSchedule sched = theorem1_schedule(net.mus());
  OptimizerState opt(gaussian_points(n, 1, 7u));
  GradientOracle oracle = [&net](int node, const Eigen::VectorXd& pt, std::uint64_t t) {
    Rng rng{42u, static_cast<std::uint64_t>(node), t};
    return noisy_gradient(net.nodes[node], pt, rng).value;
  };
  for (auto _ : state) sgp_step(opt, A, oracle, sched);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_sgp_step)->Arg(100)->Arg(1000);

void BM_sigma2_svd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MixingMatrix A = build_mixing_matrix(generate_ring(n).at(0));
  for (auto _ : state) benchmark::DoNotOptimize(sigma2(A));
}
BENCHMARK(BM_sigma2_svd)->Arg(64)->Arg(256);

}  // namespace
