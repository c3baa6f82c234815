#ifndef GRADPUSH_MIXING_HPP
#define GRADPUSH_MIXING_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>

#include "gradpush/graph.hpp"

namespace gradpush {

/// Column-stochastic mixing weights: A_ij = 1/d_j(t) whenever j is an
/// in-neighbor of i, 0 otherwise. Self-loops make every diagonal entry
/// positive. Stored sparse; the paper-scale graphs have O(n) edges.
struct MixingMatrix {
  Eigen::SparseMatrix<double> entries;  // n x n, column-major

  int size() const { return static_cast<int>(entries.rows()); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(entries); }
};

MixingMatrix build_mixing_matrix(const DirectedGraph& g);

enum class SpectralMethod { general_bound, regular_bound, empirical_sigma2 };

/// The (delta, lambda) pair controlling push-sum: delta lower-bounds the
/// weights y_i(t), lambda is the geometric contraction factor of
/// disagreement. `method` records which branch produced lambda.
struct SpectralConstants {
  double delta = 0.0;
  double lambda = 0.0;
  SpectralMethod method = SpectralMethod::general_bound;
};

/// Second-largest singular value of A. Full SVD for n <= 512; above that, a
/// power iteration on the rank-one-deflated matrix A - (1/n)11^T (valid for
/// the doubly stochastic A of regular graphs, the only place sigma_2 is
/// consulted). Tolerance 1e-10, at most 1e4 iterations; throws
/// NumericalError if the iteration fails to settle.
double sigma2(const MixingMatrix& A);

/// Worst-case constants for a B-strongly-connected sequence:
///   delta = n^{-nB}, lambda = (1 - n^{-nB})^{1/(nB)}.
/// If every graph in [0, horizon) is regular (all in- and out-degrees equal):
///   delta = 1, lambda = min{(1 - 1/(4n^3))^{1/B}, max_t sigma2(A(t))}.
SpectralConstants spectral_constants(const GraphSequence& seq, int B,
                                     std::uint64_t horizon);

/// Worst-case constants from (n, B) alone, without inspecting the graphs.
SpectralConstants worst_case_constants(int n, int B);

}  // namespace gradpush

#endif
