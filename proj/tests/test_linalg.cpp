#include "doctest.h"

#include <cmath>

#include "maxflat/linalg.hpp"
#include "maxflat/rng.hpp"

using namespace maxflat;

namespace {

Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e[i] = 1.0;
  return e;
}

// Normal-equations oracle: projection of v onto span(w) via a Gram solve.
struct ProjectionOracle {
  Vector coefficients;
  Vector projection;
  double complement_norm;
};

ProjectionOracle normal_equations(const Vector& v, const std::vector<Vector>& w) {
  const int k = static_cast<int>(w.size());
  Matrix gram(k, k);
  Vector rhs(k);
  for (int i = 0; i < k; ++i) {
    rhs[i] = w[static_cast<size_t>(i)].dot(v);
    for (int j = 0; j < k; ++j)
      gram(i, j) = w[static_cast<size_t>(i)].dot(w[static_cast<size_t>(j)]);
  }
  ProjectionOracle oracle;
  oracle.coefficients = gram.ldlt().solve(rhs);
  oracle.projection = Vector::Zero(v.size());
  for (int i = 0; i < k; ++i)
    oracle.projection += oracle.coefficients[i] * w[static_cast<size_t>(i)];
  oracle.complement_norm = (v - oracle.projection).norm();
  return oracle;
}

}  // namespace

TEST_CASE("k_subsets are lexicographic and complete") {
  const auto subsets = k_subsets(4, 2);
  REQUIRE(subsets.size() == 6);
  CHECK(subsets[0] == std::vector<int>{0, 1});
  CHECK(subsets[1] == std::vector<int>{0, 2});
  CHECK(subsets[2] == std::vector<int>{0, 3});
  CHECK(subsets[3] == std::vector<int>{1, 2});
  CHECK(subsets[4] == std::vector<int>{1, 3});
  CHECK(subsets[5] == std::vector<int>{2, 3});
  CHECK(binomial(8, 4) == 70);
}

TEST_CASE("wedge of standard basis vectors") {
  const auto w = wedge({unit(3, 0), unit(3, 1)});
  REQUIRE(w.coords.size() == 3);
  CHECK(w.coords[0] == doctest::Approx(1.0));  // {1,2}
  CHECK(w.coords[1] == doctest::Approx(0.0));  // {1,3}
  CHECK(w.coords[2] == doctest::Approx(0.0));  // {2,3}
}

TEST_CASE("wedge of a repeated vector vanishes") {
  RandomStream rng(7);
  const Vector v = rng.gaussian_vector(4);
  CHECK(wedge({v, v}).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("trailing 2x2 minors cross-checked by cofactor expansion") {
  RandomStream rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g = rng.gaussian_matrix(3, 3);
    const auto w = wedge({Vector(g.row(1)), Vector(g.row(2))});
    // Coordinates are the minors on column pairs {0,1}, {0,2}, {1,2}.
    for (int idx = 0; idx < 3; ++idx) {
      const auto subset = k_subsets(3, 2)[static_cast<size_t>(idx)];
      const double minor = g(1, subset[0]) * g(2, subset[1]) - g(1, subset[1]) * g(2, subset[0]);
      CHECK(w.coords[idx] == doctest::Approx(minor).epsilon(1e-12));
    }
    // Cofactor expansion of det(g) along the first row uses these minors.
    const double det_by_cofactors =
        g(0, 0) * w.coords[2] - g(0, 1) * w.coords[1] + g(0, 2) * w.coords[0];
    CHECK(det_by_cofactors == doctest::Approx(g.determinant()).epsilon(1e-10));
  }
}

TEST_CASE("wedge multilinearity") {
  RandomStream rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));  // 3..6
    const int k = 1 + static_cast<int>(rng.below(3));  // 1..3
    if (k > n) continue;
    std::vector<Vector> base;
    for (int i = 0; i < k; ++i) base.push_back(rng.gaussian_vector(n));
    const Vector u = rng.gaussian_vector(n);
    const Vector v = rng.gaussian_vector(n);
    const double alpha = rng.gaussian(), beta = rng.gaussian();
    const int slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));

    auto with_slot = [&](const Vector& x) {
      std::vector<Vector> vs = base;
      vs[static_cast<size_t>(slot)] = x;
      return wedge(vs).coords;
    };
    const Vector combined = with_slot(alpha * u + beta * v);
    const Vector split = alpha * with_slot(u) + beta * with_slot(v);
    const double scale = std::max(combined.norm(), 1.0);
    CHECK((combined - split).norm() / scale <= 1e-12);
  }
}

TEST_CASE("wedge norm squared equals the Gram determinant") {
  RandomStream rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(3));
    if (k > n) continue;
    std::vector<Vector> vs;
    for (int i = 0; i < k; ++i) vs.push_back(rng.gaussian_vector(n));
    Matrix gram(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        gram(i, j) = vs[static_cast<size_t>(i)].dot(vs[static_cast<size_t>(j)]);
    const double norm2 = wedge(vs).coords.squaredNorm();
    const double gramdet = gram.determinant();
    CHECK(std::abs(norm2 - gramdet) <= 1e-10 * std::max(1.0, std::abs(gramdet)));
  }
}

TEST_CASE("projection norm via wedge: axis cases") {
  CHECK(proj_norm_via_wedge(unit(2, 0), {unit(2, 1)}) == doctest::Approx(1.0));
  const Vector v = unit(2, 0) + unit(2, 1);
  CHECK(proj_norm_via_wedge(v, {unit(2, 1)}) == doctest::Approx(1.0));
}

TEST_CASE("projection coefficient via wedge: scalar and orthogonal cases") {
  RandomStream rng(19);
  const Vector w1 = rng.gaussian_vector(4);
  CHECK(proj_coeff_via_wedge(2.0 * w1, {w1}, 0) == doctest::Approx(2.0).epsilon(1e-12));

  // v orthogonal to span(W) gives zero coefficients.
  std::vector<Vector> w = {unit(4, 0), unit(4, 1)};
  const Vector v = unit(4, 2) - 3.0 * unit(4, 3);
  CHECK(proj_coeff_via_wedge(v, w, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(proj_coeff_via_wedge(v, w, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("wedge projection formulas agree with the normal-equations oracle") {
  RandomStream rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(2));  // 4..5
    const int k = 1 + static_cast<int>(rng.below(3));  // 1..3
    std::vector<Vector> w;
    for (int i = 0; i < k; ++i) w.push_back(rng.gaussian_vector(n));
    const Vector v = rng.gaussian_vector(n);
    const ProjectionOracle oracle = normal_equations(v, w);

    const double norm = proj_norm_via_wedge(v, w);
    CHECK(std::abs(norm - oracle.complement_norm) <=
          1e-12 * std::max(1.0, oracle.complement_norm));
    for (int i = 0; i < k; ++i) {
      const double c = proj_coeff_via_wedge(v, w, i);
      CHECK(std::abs(c - oracle.coefficients[i]) <=
            1e-12 * std::max(1.0, std::abs(oracle.coefficients[i])));
    }
  }
}

TEST_CASE("paired projections through wedges match the Gram-solve oracle") {
  // <pr_{W-perp}(v1), pr_{W-perp}(v2)> = <v1 ^ W, v2 ^ W> / ||^W||^2: the
  // identity behind the weight-bucket bound machinery.
  RandomStream rng(20);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(2));
    const int k = 1 + static_cast<int>(rng.below(3));
    std::vector<Vector> w;
    for (int i = 0; i < k; ++i) w.push_back(rng.gaussian_vector(n));
    const Vector v1 = rng.gaussian_vector(n);
    const Vector v2 = rng.gaussian_vector(n);

    const ProjectionOracle o1 = normal_equations(v1, w);
    const ProjectionOracle o2 = normal_equations(v2, w);
    const double direct = (v1 - o1.projection).dot(v2 - o2.projection);

    const WedgeVector base = wedge(w);
    auto extended = [&](const Vector& v) {
      std::vector<Vector> vs;
      vs.push_back(v);
      vs.insert(vs.end(), w.begin(), w.end());
      return wedge(vs).coords;
    };
    const double via_wedge =
        extended(v1).dot(extended(v2)) / base.coords.squaredNorm();
    CHECK(std::abs(via_wedge - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("degenerate spanning sets are rejected") {
  const Vector v = unit(3, 0);
  std::vector<Vector> dependent = {unit(3, 1), 2.0 * unit(3, 1)};
  CHECK_THROWS_AS((void)proj_norm_via_wedge(v, dependent), DegenerateInputError);
  CHECK_THROWS_AS((void)proj_coeff_via_wedge(v, dependent, 0), DegenerateInputError);
  CHECK_THROWS_AS((void)wedge({unit(3, 0), unit(2, 0)}), InputError);
}

TEST_CASE("sym_eigen: diagonal, exchange, and residual cases") {
  Matrix d = Vector(Eigen::Vector3d(3.0, 1.0, -4.0)).asDiagonal();
  const auto ed = sym_eigen(d);
  CHECK(ed.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(ed.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(ed.eigenvalues[2] == doctest::Approx(-4.0));

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto ex = sym_eigen(x);
  CHECK(ex.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(ex.eigenvalues[1] == doctest::Approx(-1.0));

  RandomStream rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix raw = rng.gaussian_matrix(5, 5);
    const Matrix s = raw + raw.transpose();
    const auto e = sym_eigen(s);
    const Matrix recon =
        e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
    CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(5, 5)).norm() <=
          1e-12);
    CHECK((recon - s).norm() <= 1e-10 * s.norm());
  }

  Matrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS((void)sym_eigen(asym), InputError);
}

TEST_CASE("haar_orthogonal: determinism and structure") {
  const Matrix a = haar_orthogonal(3, 123u);
  const Matrix b = haar_orthogonal(3, 123u);
  CHECK((a - b).norm() == 0.0);

  RandomStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix k = haar_orthogonal(2, rng);
    CHECK((k.transpose() * k - Matrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK(k.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("haar_orthogonal: Monte-Carlo entry symmetry") {
  RandomStream rng(37);
  const int samples = 100000;
  double mean = 0.0;
  for (int s = 0; s < samples; ++s) mean += haar_orthogonal(3, rng)(0, 0);
  mean /= samples;
  CHECK(std::abs(mean) <= 0.01);  // 3 sigma for this sample size
}
