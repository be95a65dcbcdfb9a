#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "maxflat/group.hpp"

using namespace maxflat;

namespace {

// Exhaustive set-partition oracle for genericity: H lies in a proper Levi
// subspace iff some partition of the indices into >= 2 blocks has all block
// sums zero. Independent of the subset-sum route used by is_generic.
bool partition_oracle_in_levi(const Vector& h, double tol) {
  const int n = static_cast<int>(h.size());
  std::vector<int> assignment(static_cast<size_t>(n), -1);
  std::function<bool(int, int)> recurse = [&](int index, int blocks) -> bool {
    if (index == n) {
      if (blocks < 2) return false;
      std::vector<double> sums(static_cast<size_t>(blocks), 0.0);
      for (int i = 0; i < n; ++i) sums[static_cast<size_t>(assignment[static_cast<size_t>(i)])] += h[i];
      for (double s : sums)
        if (std::abs(s) > tol) return false;
      return true;
    }
    for (int b = 0; b <= blocks && b < n; ++b) {
      assignment[static_cast<size_t>(index)] = b;
      if (recurse(index + 1, std::max(blocks, b + 1))) return true;
    }
    return false;
  };
  return recurse(0, 0);
}

long factorial(int n) {
  long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("iwasawa: identity and orthogonal absorption") {
  const GroupElement id = GroupElement::identity(3);
  const IwasawaFactors f = iwasawa(id);
  CHECK((f.n_part - Matrix::Identity(3, 3)).norm() <= 1e-14);
  CHECK((f.a_part - Matrix::Identity(3, 3)).norm() <= 1e-14);
  CHECK((f.k_part - Matrix::Identity(3, 3)).norm() <= 1e-14);

  const Matrix k = haar_orthogonal(4, 5u);
  const IwasawaFactors fk = iwasawa(GroupElement(k));
  CHECK((fk.n_part - Matrix::Identity(4, 4)).norm() <= 1e-12);
  CHECK((fk.a_part - Matrix::Identity(4, 4)).norm() <= 1e-12);
  CHECK((fk.k_part - k).norm() <= 1e-12);
}

TEST_CASE("iwasawa: upper-half-plane coordinates on SL2") {
  const double x = 0.7, y = 2.3;
  Matrix n(2, 2), a(2, 2);
  n << 1, x, 0, 1;
  a << std::sqrt(y), 0, 0, 1.0 / std::sqrt(y);
  const GroupElement g(n * a);
  const IwasawaFactors f = iwasawa(g);
  CHECK((f.n_part - n).norm() <= 1e-12);
  CHECK((f.a_part - a).norm() <= 1e-12);
  CHECK((f.k_part - Matrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("iwasawa: reconstruction and factor shapes on random elements") {
  RandomStream rng(41);
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const GroupElement g = GroupElement::random(n, rng);
      const IwasawaFactors f = iwasawa(g);
      CHECK((f.reconstruct() - g.mat()).norm() <= kReconstructionRel * g.mat().norm());
      CHECK((f.k_part.transpose() * f.k_part - Matrix::Identity(n, n)).norm() <=
            kOrthogonalityTol);
      CHECK(f.k_part.determinant() == doctest::Approx(1.0).epsilon(1e-10));
      for (int i = 0; i < n; ++i) {
        CHECK(f.a_part(i, i) > 0.0);
        CHECK(f.n_part(i, i) == 1.0);
        for (int j = 0; j < i; ++j) {
          CHECK(f.n_part(i, j) == 0.0);
          CHECK(f.a_part(i, j) == 0.0);
          CHECK(f.a_part(j, i) == 0.0);
        }
      }
      CHECK(std::abs(f.a_part.determinant() - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("iwasawa rejects non-invertible input") {
  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS((void)iwasawa_positive_det(singular), InputError);
}

TEST_CASE("height: identity, diagonal, and left A-equivariance") {
  CHECK(iwasawa_height(GroupElement::identity(3)).norm() <= 1e-14);

  Matrix d(2, 2);
  d << std::exp(2.0), 0, 0, std::exp(-2.0);
  const CartanVector h = iwasawa_height(GroupElement(d));
  CHECK(h.coords()[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h.coords()[1] == doctest::Approx(-2.0).epsilon(1e-12));

  RandomStream rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(3));
    const GroupElement g = GroupElement::random(n, rng);
    const CartanVector log_a = random_cartan(n, rng);
    const GroupElement ag(log_a.exp_diagonal() * g.mat());
    const Vector expected = log_a.coords() + iwasawa_height(g).coords();
    CHECK((iwasawa_height(ag).coords() - expected).norm() <= 1e-10);
  }
}

TEST_CASE("project_nak: shapes and the summation identity") {
  RandomStream rng(47);

  Matrix upper = Matrix::Zero(3, 3);
  upper(0, 1) = 2.0;
  upper(1, 2) = -1.0;
  const auto pu = project_nak(LieAlgebraElement(upper));
  CHECK((pu.n_comp - upper).norm() <= 1e-14);
  CHECK(pu.a_comp.norm() <= 1e-14);
  CHECK(pu.k_comp.norm() <= 1e-14);

  Matrix anti = Matrix::Zero(3, 3);
  anti(0, 1) = 1.5;
  anti(1, 0) = -1.5;
  anti(2, 0) = 0.5;
  anti(0, 2) = -0.5;
  const auto pa = project_nak(LieAlgebraElement(anti));
  CHECK(pa.n_comp.norm() <= 1e-14);
  CHECK(pa.a_comp.norm() <= 1e-14);
  CHECK((pa.k_comp - anti).norm() <= 1e-14);

  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    Matrix raw = rng.gaussian_matrix(n, n);
    raw.diagonal().array() -= raw.trace() / n;
    const LieAlgebraElement x(raw);
    const auto parts = project_nak(x);
    CHECK((parts.n_comp + parts.a_comp + parts.k_comp - raw).norm() <= 1e-15 * raw.norm());
    CHECK((parts.k_comp + parts.k_comp.transpose()).norm() <= 1e-14);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j)
        if (i != j) {
          CHECK(parts.n_comp(i, j) == 0.0);
          CHECK(parts.a_comp(i, j) == 0.0);
        }
    CHECK(std::abs(parts.a_comp.trace()) <= 1e-12 * std::max(1.0, raw.norm()));
  }
}

TEST_CASE("root_project and reconstruction from root spaces") {
  Matrix e12 = Matrix::Zero(3, 3);
  e12(0, 1) = 1.0;
  const LieAlgebraElement x(e12);
  const RootDatum rd = RootDatum::make(3);
  for (const auto& alpha : rd.roots) {
    const double expected = (alpha == std::make_pair(0, 1)) ? 1.0 : 0.0;
    CHECK(root_project(x, alpha) == expected);
  }

  RandomStream rng(53);
  const int n = 4;
  const RootDatum rd4 = RootDatum::make(n);
  Matrix raw = rng.gaussian_matrix(n, n);
  raw.diagonal().array() -= raw.trace() / n;
  const LieAlgebraElement y(raw);
  Matrix rebuilt = Matrix(raw.diagonal().asDiagonal());
  for (const auto& alpha : rd4.roots) {
    Matrix unit = Matrix::Zero(n, n);
    unit(alpha.first, alpha.second) = 1.0;
    rebuilt += root_project(y, alpha) * unit;
  }
  CHECK((rebuilt - raw).norm() <= 1e-14);

  Matrix diag = Vector(Eigen::Vector3d(1.0, 0.0, -1.0)).asDiagonal();
  const LieAlgebraElement z(diag);
  for (const auto& alpha : rd.roots) CHECK(root_project(z, alpha) == 0.0);
}

TEST_CASE("regularity, genericity, chamber membership") {
  auto cv = [](std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return CartanVector(v);
  };

  CHECK(is_regular(cv({1, 0, -1})));
  CHECK_FALSE(is_regular(cv({1, 1, -2})));
  CHECK_FALSE(is_generic(cv({1, 0, -1})));   // the zero coordinate is a singleton subset
  CHECK(is_generic(cv({1, 2, -3})));
  CHECK(is_generic(cv({3, 1, -4})));
  CHECK_FALSE(is_generic(cv({2, -1, -1})));  // not regular

  CHECK(in_positive_chamber(cv({1, 0, -1})));
  CHECK_FALSE(in_positive_chamber(cv({0, 1, -1})));

  // The longest Weyl element sends the positive chamber to the negative one.
  const CartanVector chamber = cv({3, 1, -4});
  Vector reversed(3);
  for (int i = 0; i < 3; ++i) reversed[i] = chamber.coords()[2 - i];
  const CartanVector flipped(reversed);
  for (int i = 0; i + 1 < 3; ++i)
    CHECK(flipped.coords()[i] < flipped.coords()[i + 1]);

  // Random regular vectors exist densely.
  RandomStream rng(59);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(is_regular(random_regular_cartan(3, rng)));
}

TEST_CASE("is_generic agrees with the exhaustive Levi-partition oracle") {
  RandomStream rng(61);
  for (int n = 3; n <= 5; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      Vector v = rng.gaussian_vector(n);
      v.array() -= v.mean();
      // Mix in structured cases that do lie in Levi subspaces: zero-sum
      // leading pair, the tail balanced separately.
      if (trial % 4 == 0 && n >= 4) {
        v[1] = -v[0];
        double tail_mean = 0.0;
        for (int i = 2; i < n; ++i) tail_mean += v[i];
        tail_mean /= (n - 2);
        for (int i = 2; i < n; ++i) v[i] -= tail_mean;
      }
      const CartanVector h(v);
      const double tol = kDistinctRel * std::max(h.norm(), 1e-300);
      const bool oracle = !partition_oracle_in_levi(v, tol) && is_regular(h);
      CHECK(is_generic(h) == oracle);
    }
  }
}

TEST_CASE("c_alpha coordinates are prefix sums and reconstruct H") {
  const CartanVector h1(Vector(Eigen::Vector3d(1.0, -1.0, 0.0)));
  const Vector c1 = c_alpha_coords(h1);
  CHECK(c1[0] == doctest::Approx(1.0));
  CHECK(c1[1] == doctest::Approx(0.0));

  CHECK(c_alpha_coords(CartanVector::zero(4)).norm() == 0.0);

  RandomStream rng(67);
  const RootDatum rd = RootDatum::make(5);
  for (int trial = 0; trial < 30; ++trial) {
    const CartanVector h = random_cartan(5, rng);
    const Vector c = c_alpha_coords(h);
    Vector rebuilt = Vector::Zero(5);
    for (size_t s = 0; s < rd.simples.size(); ++s)
      rebuilt += c[static_cast<Eigen::Index>(s)] * rd.coroot(rd.simples[s]);
    CHECK((rebuilt - h.coords()).norm() <= 1e-12 * std::max(1.0, h.norm()));
  }
}

TEST_CASE("weyl orbits and stabilizer cardinalities") {
  const CartanVector regular(Vector(Eigen::Vector3d(1.0, 0.0, -1.0)));
  CHECK(weyl_orbit(regular).size() == 6);

  const CartanVector repeated(Vector(Eigen::Vector3d(1.0, 1.0, -2.0)));
  CHECK(weyl_orbit(repeated).size() == 3);

  // Orbit size equals n! / |stabilizer| (exhaustive for n <= 4).
  RandomStream rng(71);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      Vector v = rng.gaussian_vector(n);
      v.array() -= v.mean();
      if (trial % 3 == 0 && n >= 3) {
        v[1] = v[0];  // force a repeat
        v.array() -= v.mean();
        v[1] = v[0];
      }
      const CartanVector h(v);
      long stabilizer = 0;
      const auto group = weyl_group(n);
      for (const auto& w : group) {
        bool fixes = true;
        for (int i = 0; i < n; ++i)
          if (v[w.perm[static_cast<size_t>(i)]] != v[i]) fixes = false;
        if (fixes) ++stabilizer;
      }
      CHECK(static_cast<long>(weyl_orbit(h).size()) == factorial(n) / stabilizer);
    }
  }
}

TEST_CASE("kappa of block-diagonal elements stays block-diagonal") {
  RandomStream rng(73);
  auto random_positive_det_block = [&rng]() {
    Matrix b = rng.gaussian_matrix(2, 2);
    while (std::abs(b.determinant()) < 0.05) b = rng.gaussian_matrix(2, 2);
    if (b.determinant() < 0) b.row(0) = -b.row(0);
    return b;
  };
  for (int trial = 0; trial < 30; ++trial) {
    // Two 2x2 blocks with reciprocal determinants, total det 1.
    const Matrix top = random_positive_det_block();
    Matrix bottom = random_positive_det_block();
    bottom *= std::sqrt(1.0 / (top.determinant() * bottom.determinant()));

    Matrix g = Matrix::Zero(4, 4);
    g.block(0, 0, 2, 2) = top;
    g.block(2, 2, 2, 2) = bottom;

    const IwasawaFactors f = iwasawa(GroupElement(g));
    CHECK(f.k_part.block(0, 2, 2, 2).norm() <= 1e-10);
    CHECK(f.k_part.block(2, 0, 2, 2).norm() <= 1e-10);
  }
}

TEST_CASE("weyl representatives are special orthogonal") {
  for (const auto& w : weyl_group(4)) {
    const Matrix m = w.orthogonal_representative();
    CHECK((m.transpose() * m - Matrix::Identity(4, 4)).norm() <= 1e-14);
    CHECK(m.determinant() == doctest::Approx(1.0));
  }
}

TEST_CASE("cartan_orthonormal_basis spans the traceless diagonals") {
  for (int n = 2; n <= 6; ++n) {
    const Matrix b = cartan_orthonormal_basis(n);
    CHECK((b.transpose() * b - Matrix::Identity(n - 1, n - 1)).norm() <= 1e-12);
    for (int c = 0; c + 1 < n; ++c)
      CHECK(std::abs(b.col(c).sum()) <= 1e-12);
  }
}
