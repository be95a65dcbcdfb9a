#include "maxflat/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace maxflat {

GroupElement::GroupElement(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 2)
    throw InputError("GroupElement: need a square matrix, n >= 2");
  if (!all_finite(mat_)) throw InputError("GroupElement: non-finite entries");
  const double det = mat_.determinant();
  if (std::abs(det - 1.0) > kDetTol)
    throw InputError("GroupElement: determinant " + std::to_string(det) + " is not 1");
}

GroupElement GroupElement::random(int n, RandomStream& rng) {
  while (true) {
    Matrix m = rng.gaussian_matrix(n, n);
    double det = m.determinant();
    if (std::abs(det) < 1e-8) continue;
    if (det < 0.0) {
      m.row(0) = -m.row(0);
      det = -det;
    }
    m /= std::pow(det, 1.0 / n);
    // One multiplicative correction pass: pow + determinant rounding can
    // leave |det - 1| slightly above the ctor tolerance for larger n.
    m /= std::pow(m.determinant(), 1.0 / n);
    return GroupElement(m);
  }
}

CartanVector::CartanVector(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw InputError("CartanVector: need n >= 2");
  if (!all_finite(coords_)) throw InputError("CartanVector: non-finite entries");
  const double scale = std::max(coords_.norm(), 1.0);
  if (std::abs(coords_.sum()) > 1e-12 * scale)
    throw InputError("CartanVector: coordinates do not sum to zero");
}

Matrix CartanVector::exp_diagonal() const {
  Vector e = coords_.array().exp();
  return e.asDiagonal();
}

CartanVector CartanVector::project(const Vector& v) {
  return CartanVector(v.array() - v.mean());
}

LieAlgebraElement::LieAlgebraElement(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw InputError("LieAlgebraElement: not square");
  if (!all_finite(mat_)) throw InputError("LieAlgebraElement: non-finite entries");
  const double scale = std::max(mat_.norm(), 1.0);
  if (std::abs(mat_.trace()) > kTraceRel * scale)
    throw InputError("LieAlgebraElement: trace is not zero");
}

RootDatum RootDatum::make(int n) {
  RootDatum rd;
  rd.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rd.roots.emplace_back(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) rd.positives.emplace_back(i, j);
  for (int i = 0; i + 1 < n; ++i) rd.simples.emplace_back(i, i + 1);
  return rd;
}

Vector RootDatum::coroot(const std::pair<int, int>& alpha) const {
  Vector h = Vector::Zero(n);
  h[alpha.first] = 1.0;
  h[alpha.second] = -1.0;
  return h;
}

Matrix WeylElement::orthogonal_representative() const {
  const int n = static_cast<int>(perm.size());
  Matrix m = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) m(perm[static_cast<size_t>(j)], j) = 1.0;
  if (m.determinant() < 0.0) m.col(0) = -m.col(0);
  return m;
}

IwasawaFactors iwasawa(const GroupElement& g) { return iwasawa_positive_det(g.mat()); }

IwasawaFactors iwasawa_positive_det(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("iwasawa: matrix not square");
  if (!all_finite(m)) throw InputError("iwasawa: non-finite entries");
  if (!(m.determinant() > 0.0)) throw InputError("iwasawa: determinant not positive");
  const int n = static_cast<int>(m.rows());

  // Bottom-up modified Gram-Schmidt on rows with a second orthogonalization
  // pass, then a polar polish of the orthogonal factor. The row order is
  // convention-bound: no pivoting.
  Matrix q(n, n);
  for (int i = n - 1; i >= 0; --i) {
    Vector u = m.row(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = n - 1; j > i; --j) u -= u.dot(q.row(j)) * q.row(j).transpose();
    }
    const double r = u.norm();
    if (r <= kAbsFloor || !std::isfinite(r))
      throw InputError("iwasawa: degenerate row family (matrix not invertible)");
    q.row(i) = u / r;
  }

  // Polar projection of q onto SO(n) removes the residual loss of
  // orthogonality from cancellation in the subtraction steps.
  Eigen::JacobiSVD<Matrix> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix k = svd.matrixU() * svd.matrixV().transpose();

  // With k fixed, b = g k^T is upper triangular up to roundoff; read the
  // unique N and A factors off it.
  const Matrix b = m * k.transpose();  // b_ij = n_ij * a_jj, upper triangular
  IwasawaFactors f;
  f.a_part = Matrix::Zero(n, n);
  f.n_part = Matrix::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    const double d = b(j, j);
    if (!(d > 0.0))
      throw NumericalError("iwasawa: non-positive diagonal in triangular factor");
    f.a_part(j, j) = d;
    for (int i = 0; i < j; ++i) f.n_part(i, j) = b(i, j) / d;
  }
  f.k_part = std::move(k);
  return f;
}

CartanVector iwasawa_height(const GroupElement& g) {
  const IwasawaFactors f = iwasawa(g);
  Vector logs(g.n());
  for (int i = 0; i < g.n(); ++i) logs[i] = std::log(f.a_part(i, i));
  // det a = 1 up to the group-element tolerance; re-center so the result is
  // an exactly traceless vector.
  return CartanVector::project(logs);
}

LieIwasawaParts project_nak(const LieAlgebraElement& x) {
  const int n = x.n();
  const Matrix& m = x.mat();

  Matrix lower = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) lower(i, j) = m(i, j);

  LieIwasawaParts parts;
  parts.k_comp = lower - lower.transpose();
  parts.a_comp = m.diagonal().asDiagonal();
  parts.n_comp = m - parts.a_comp - parts.k_comp;
  return parts;
}

double root_project(const LieAlgebraElement& x, const std::pair<int, int>& alpha) {
  if (alpha.first == alpha.second || alpha.first < 0 || alpha.second < 0 ||
      alpha.first >= x.n() || alpha.second >= x.n())
    throw InputError("root_project: invalid root index pair");
  return x.mat()(alpha.first, alpha.second);
}

bool is_regular(const CartanVector& h) {
  const int n = h.n();
  const double tol = kDistinctRel * std::max(h.norm(), kAbsFloor);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(h.coords()[i] - h.coords()[j]) <= tol) return false;
  return true;
}

bool is_generic(const CartanVector& h) {
  if (!is_regular(h)) return false;
  const int n = h.n();
  const double tol = kDistinctRel * std::max(h.norm(), kAbsFloor);
  // Proper nonempty subsets; complements have opposite sums, so scanning
  // all masks is twice the necessary work but trivially cheap for n <= 8.
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) sum += h.coords()[i];
    if (std::abs(sum) <= tol) return false;
  }
  return true;
}

bool in_positive_chamber(const CartanVector& h) {
  for (int i = 0; i + 1 < h.n(); ++i)
    if (!(h.coords()[i] > h.coords()[i + 1])) return false;
  return true;
}

Vector c_alpha_coords(const CartanVector& h) {
  const int n = h.n();
  Vector c(n - 1);
  double run = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    run += h.coords()[i];
    c[i] = run;
  }
  return c;
}

std::vector<CartanVector> weyl_orbit(const CartanVector& h) {
  const int n = h.n();
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);

  std::set<std::vector<double>> seen;
  std::vector<CartanVector> orbit;
  std::sort(idx.begin(), idx.end());
  do {
    Vector permuted(n);
    for (int i = 0; i < n; ++i) permuted[i] = h.coords()[idx[static_cast<size_t>(i)]];
    std::vector<double> key(permuted.data(), permuted.data() + n);
    if (seen.insert(key).second) orbit.emplace_back(permuted);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return orbit;
}

std::vector<WeylElement> weyl_group(int n) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<WeylElement> out;
  do {
    out.push_back(WeylElement{idx});
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

Matrix cartan_orthonormal_basis(int n) {
  Matrix basis(n, n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    Vector v = Vector::Zero(n);
    v[i] = 1.0;
    v[i + 1] = -1.0;
    for (int j = 0; j < i; ++j) v -= v.dot(basis.col(j)) * basis.col(j);
    basis.col(i) = v / v.norm();
  }
  return basis;
}

CartanVector random_cartan(int n, RandomStream& rng) {
  return CartanVector::project(rng.gaussian_vector(n));
}

CartanVector random_regular_cartan(int n, RandomStream& rng, double min_gap) {
  while (true) {
    Vector v = rng.gaussian_vector(n);
    v.array() -= v.mean();
    const double norm = v.norm();
    if (norm < 1e-3) continue;
    v *= std::sqrt(static_cast<double>(n)) / norm;
    Vector sorted = v;
    std::sort(sorted.data(), sorted.data() + n);
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) gap = std::min(gap, sorted[i + 1] - sorted[i]);
    if (gap >= min_gap) return CartanVector(v);
  }
}

CartanVector random_generic_cartan(int n, RandomStream& rng) {
  while (true) {
    CartanVector h = random_cartan(n, rng);
    if (h.norm() < 1e-3) continue;
    CartanVector scaled(h.coords() * (std::sqrt(static_cast<double>(n)) / h.norm()));
    if (is_generic(scaled)) return scaled;
  }
}

}  // namespace maxflat
