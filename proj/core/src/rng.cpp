#include "maxflat/rng.hpp"

#include <cmath>

namespace maxflat {

double RandomStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

Vector RandomStream::gaussian_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian();
  return v;
}

Matrix RandomStream::gaussian_matrix(int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
  return m;
}

RandomStream RandomStream::fork(std::uint64_t salt) {
  // SplitMix64-style mix of the salt with fresh entropy from this stream.
  std::uint64_t z = engine_() + salt + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return RandomStream(z ^ (z >> 31));
}

Matrix haar_orthogonal(int n, RandomStream& rng) {
  if (n < 2) throw InputError("haar_orthogonal: need n >= 2");
  const Matrix gauss = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Positive-diagonal convention makes the factorization unique, which is
  // what ties the output distribution to Haar measure on O(n).
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(n - 1) = -q.col(n - 1);
  return q;
}

Matrix haar_orthogonal(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  return haar_orthogonal(n, rng);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + (salt + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace maxflat
