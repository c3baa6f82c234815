#include "gradpush/mixing.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "gradpush/errors.hpp"
#include "gradpush/rng.hpp"

namespace gradpush {

MixingMatrix build_mixing_matrix(const DirectedGraph& g) {
  int n = g.node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 3);
  for (int j = 0; j < n; ++j) {
    int d = g.out_degree(j);
    if (d <= 0) throw ValidationError("build_mixing_matrix: node with out-degree 0");
    double w = 1.0 / static_cast<double>(d);
    for (int i : g.out_neighbors(j)) triplets.emplace_back(i, j, w);
  }
  MixingMatrix A;
  A.entries.resize(n, n);
  A.entries.setFromTriplets(triplets.begin(), triplets.end());
  A.entries.makeCompressed();
  return A;
}

namespace {

constexpr double kSigmaTol = 1e-10;
constexpr int kSigmaMaxIter = 10000;

double sigma2_power_iteration(const Eigen::SparseMatrix<double>& A) {
  const int n = static_cast<int>(A.rows());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  // Deflate the (sigma=1, 1/sqrt(n), 1/sqrt(n)) pair of the doubly
  // stochastic A: apply B = A - (1/n) 1 1^T as an operator.
  auto apply_B = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return A * v - (v.sum() / n) * ones;
  };
  auto apply_Bt = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return A.transpose() * v - (v.sum() / n) * ones;
  };

  Rng rng(0x5169A2u);
  Eigen::VectorXd v = rng.normal_vector(n);
  v.array() -= v.mean();
  if (v.norm() == 0.0) v = Eigen::VectorXd::Unit(n, 0) - ones / n;
  v.normalize();

  double sigma_sq = 0.0;
  for (int it = 0; it < kSigmaMaxIter; ++it) {
    Eigen::VectorXd bv = apply_B(v);
    double next = bv.squaredNorm();
    Eigen::VectorXd w = apply_Bt(bv);
    double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;  // v already in the null space: sigma2 = 0
    v = w / wnorm;
    if (std::abs(next - sigma_sq) <= kSigmaTol * std::max(1.0, next))
      return std::sqrt(std::max(next, 0.0));
    sigma_sq = next;
  }
  throw NumericalError("sigma2: power iteration did not converge");
}

}  // namespace

double sigma2(const MixingMatrix& A) {
  int n = A.size();
  if (n == 1) return 0.0;
  if (n <= 512) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A.dense());
    return svd.singularValues()(1);
  }
  return sigma2_power_iteration(A.entries);
}

SpectralConstants worst_case_constants(int n, int B) {
  if (n <= 0 || B <= 0)
    throw ValidationError("worst_case_constants: n and B must be positive");
  SpectralConstants c;
  c.method = SpectralMethod::general_bound;
  double nB = static_cast<double>(n) * static_cast<double>(B);
  // delta = n^{-nB}; underflows to 0 for large n, which only loosens the
  // bounds built from it (they become +inf).
  c.delta = std::exp(-nB * std::log(static_cast<double>(n)));
  c.lambda = std::exp(std::log1p(-c.delta) / nB);
  return c;
}

SpectralConstants spectral_constants(const GraphSequence& seq, int B,
                                     std::uint64_t horizon) {
  if (horizon == 0) throw ValidationError("spectral_constants: horizon must be positive");
  int n = seq.node_count();
  std::uint64_t distinct = seq.time_invariant() ? 1 : horizon;

  bool all_regular = true;
  for (std::uint64_t t = 0; t < distinct; ++t) {
    if (!seq.at(t).is_regular()) {
      all_regular = false;
      break;
    }
  }
  if (!all_regular) return worst_case_constants(n, B);

  double max_sigma = 0.0;
  for (std::uint64_t t = 0; t < distinct; ++t)
    max_sigma = std::max(max_sigma, sigma2(build_mixing_matrix(seq.at(t))));

  double degree_bound =
      std::pow(1.0 - 1.0 / (4.0 * std::pow(static_cast<double>(n), 3)),
               1.0 / static_cast<double>(B));

  SpectralConstants c;
  c.delta = 1.0;
  if (max_sigma < degree_bound) {
    c.lambda = max_sigma;
    c.method = SpectralMethod::empirical_sigma2;
  } else {
    c.lambda = degree_bound;
    c.method = SpectralMethod::regular_bound;
  }
  return c;
}

}  // namespace gradpush
