#include "maxflat/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace maxflat {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

double asymmetry(const Matrix& s) {
  const double scale = std::max(s.norm(), kAbsFloor);
  return (s - s.transpose()).norm() / scale;
}

std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  if (k == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> subset(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) subset[static_cast<size_t>(i)] = i;
  while (true) {
    out.push_back(subset);
    int i = k - 1;
    while (i >= 0 && subset[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++subset[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      subset[static_cast<size_t>(j)] = subset[static_cast<size_t>(j - 1)] + 1;
  }
  return out;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t num = 1;
  for (int i = 0; i < k; ++i) {
    num = num * (n - i) / (i + 1);
  }
  return num;
}

WedgeVector wedge_rows(const Matrix& stacked) {
  const int k = static_cast<int>(stacked.rows());
  const int n = static_cast<int>(stacked.cols());
  if (k < 1 || k > n)
    throw InputError("wedge: need 1 <= k <= n, got k=" + std::to_string(k) +
                     ", n=" + std::to_string(n));
  if (!all_finite(stacked)) throw InputError("wedge: non-finite entries");

  const auto subsets = k_subsets(n, k);
  WedgeVector w;
  w.ambient_dim = n;
  w.degree = k;
  w.coords.resize(static_cast<Eigen::Index>(subsets.size()));

  Matrix minor(k, k);
  for (size_t s = 0; s < subsets.size(); ++s) {
    for (int j = 0; j < k; ++j) minor.col(j) = stacked.col(subsets[s][static_cast<size_t>(j)]);
    w.coords[static_cast<Eigen::Index>(s)] =
        (k == 1) ? minor(0, 0)
                 : (k == 2) ? minor(0, 0) * minor(1, 1) - minor(0, 1) * minor(1, 0)
                            : minor.determinant();
  }
  return w;
}

WedgeVector wedge(const std::vector<Vector>& vectors) {
  if (vectors.empty()) throw InputError("wedge: empty vector list");
  const auto n = vectors.front().size();
  Matrix stacked(static_cast<Eigen::Index>(vectors.size()), n);
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != n) throw InputError("wedge: mixed vector dimensions");
    stacked.row(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  return wedge_rows(stacked);
}

namespace {

double dependence_floor(const std::vector<Vector>& w) {
  double prod = 1.0;
  for (const auto& wi : w) prod *= wi.norm();
  return std::max(kDependentRel * prod, kAbsFloor);
}

}  // namespace

double proj_norm_via_wedge(const Vector& v, const std::vector<Vector>& w) {
  const WedgeVector base = wedge(w);
  const double base_norm = base.norm();
  if (base_norm <= dependence_floor(w))
    throw DegenerateInputError("proj_norm_via_wedge: dependent spanning set");

  std::vector<Vector> extended;
  extended.reserve(w.size() + 1);
  extended.push_back(v);
  extended.insert(extended.end(), w.begin(), w.end());
  return wedge(extended).norm() / base_norm;
}

double proj_coeff_via_wedge(const Vector& v, const std::vector<Vector>& w, int i) {
  if (i < 0 || i >= static_cast<int>(w.size()))
    throw InputError("proj_coeff_via_wedge: index out of range");
  const WedgeVector base = wedge(w);
  const double base_norm = base.norm();
  if (base_norm <= dependence_floor(w))
    throw DegenerateInputError("proj_coeff_via_wedge: dependent spanning set");

  std::vector<Vector> replaced = w;
  replaced[static_cast<size_t>(i)] = v;
  return wedge(replaced).coords.dot(base.coords) / (base_norm * base_norm);
}

SymmetricEigen sym_eigen(const Matrix& s) {
  if (s.rows() != s.cols()) throw InputError("sym_eigen: matrix not square");
  if (!all_finite(s)) throw InputError("sym_eigen: non-finite entries");
  if (asymmetry(s) > 1e-10) throw InputError("sym_eigen: matrix not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
  if (solver.info() != Eigen::Success) throw NumericalError("sym_eigen: solver failed");

  // Eigen sorts ascending; flip to descending.
  const Eigen::Index n = s.rows();
  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = solver.eigenvalues()[n - 1 - i];
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

Vector sym_eigenvalues(const Matrix& s) { return sym_eigen(s).eigenvalues; }

}  // namespace maxflat
