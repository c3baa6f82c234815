#ifndef GRADPUSH_RNG_HPP
#define GRADPUSH_RNG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <initializer_list>

// Counter-based random substreams. Every consumer of randomness derives its
// own stream from a (seed, tag...) key, so evaluation order never changes the
// numbers drawn and any (seed, t) query is replayable without storing history.
// Distributions are hand-rolled on top of splitmix64 to keep output
// byte-identical across standard libraries.

namespace gradpush {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Collapses a key tuple into one 64-bit stream seed.
inline std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = kGolden;
  for (std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  Rng(std::initializer_list<std::uint64_t> keys) : state_(mix_keys(keys)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t floor = (-n) % n;
      while (lo < floor) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller (spare discarded to keep streams simple).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = normal();
    return v;
  }

  /// Uniform on the closed Euclidean ball of the given radius.
  Eigen::VectorXd uniform_ball(int d, double radius) {
    Eigen::VectorXd dir = normal_vector(d);
    double norm = dir.norm();
    while (norm == 0.0) {
      dir = normal_vector(d);
      norm = dir.norm();
    }
    double r = radius * std::pow(uniform01(), 1.0 / d);
    return dir * (r / norm);
  }

private:
  std::uint64_t state_;
};

}  // namespace gradpush

#endif
