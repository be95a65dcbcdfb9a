#ifndef MAXFLAT_RNG_HPP
#define MAXFLAT_RNG_HPP

#include <cstdint>
#include <random>

#include "maxflat/linalg.hpp"

namespace maxflat {

/// Deterministic random stream. Draws are fully specified here (mt19937_64
/// plus explicit bit-to-double mappings) so that seeded runs reproduce
/// byte-identically regardless of standard-library distribution internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1), 53-bit resolution.
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;  // top 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller with a cached spare.
  double gaussian();

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  Vector gaussian_vector(int n);
  Matrix gaussian_matrix(int rows, int cols);

  /// Derive an independent child stream; used to keep per-sample draws
  /// independent of loop order.
  RandomStream fork(std::uint64_t salt);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-distributed element of SO(n): Gaussian matrix, orthogonal
/// factorization with the positive-diagonal sign convention, determinant
/// corrected by flipping the last column. Deterministic given the stream.
Matrix haar_orthogonal(int n, RandomStream& rng);
Matrix haar_orthogonal(int n, std::uint64_t seed);

/// Stateless SplitMix64 combination of a seed with a salt; used to hand
/// independent deterministic seeds to sub-tasks.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace maxflat

#endif
