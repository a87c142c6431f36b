#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "fpsub/algebra.hpp"

namespace fpsub {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i of stream s under seed k is
///   splitmix64(key + (i + 1) * 0x9E3779B97F4A7C15),  key = k ^ splitmix64(s).
/// Any draw is addressable without replaying earlier ones.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(seed ^ splitmix64(stream)), counter_(0) {}

  std::uint64_t at(std::uint64_t i) const { return splitmix64(key_ + (i + 1) * kGamma); }
  std::uint64_t next() { return at(counter_++); }

  /// Uniform on (0, 1]: (top 53 bits + 1) * 2^-53.
  double uniform() { return double((next() >> 11) + 1) * 0x1.0p-53; }

  /// Complex Gaussian with E|z|^2 = 1 (real and imaginary parts N(0, 1/2)):
  /// sqrt(-ln u1) * exp(2 pi i u2).
  Scalar gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  /// Row-major fill with unit complex Gaussians.
  CMatrix gaussian_matrix(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
    return m;
  }

  /// (M + M*) / 2 rescaled to spectral norm `bound`.
  CMatrix self_adjoint(int n, double bound) {
    CMatrix m = gaussian_matrix(n, n);
    CMatrix h = (m + m.adjoint()) / 2.0;
    return h * (bound / spectral_norm(h));
  }

  /// Gaussian matrix rescaled to spectral norm `norm`.
  CMatrix scaled(int n, double norm) {
    CMatrix m = gaussian_matrix(n, n);
    return m * (norm / spectral_norm(m));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace fpsub
