#ifndef MAXFLAT_LINALG_HPP
#define MAXFLAT_LINALG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "maxflat/errors.hpp"

namespace maxflat {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute floor below which norms are treated as zero, guarding divisions
/// against underflow. All other thresholds are relative to input scale.
inline constexpr double kAbsFloor = 1e-300;

/// Wedge norm <= kDependentRel * (product of vector norms) signals a
/// linearly dependent family. Scale-invariant.
inline constexpr double kDependentRel = 1e-10;

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

/// Frobenius distance of s from its own transpose, relative to ||s||.
double asymmetry(const Matrix& s);

// ---------------------------------------------------------------------------
// k-subsets of {0..n-1} in lexicographic order
// ---------------------------------------------------------------------------

/// All k-element subsets of {0,...,n-1}, each sorted ascending, the list in
/// lexicographic order. This order indexes the induced basis of the k-th
/// exterior power and is fixed so coordinates are comparable across runs.
std::vector<std::vector<int>> k_subsets(int n, int k);

/// C(n, k) as a 64-bit integer.
std::int64_t binomial(int n, int k);

// ---------------------------------------------------------------------------
// Exterior powers
// ---------------------------------------------------------------------------

/// A vector in the k-th exterior power of R^n, expressed in the induced
/// basis e_T = e_{t_1} ^ ... ^ e_{t_k} over lexicographically ordered
/// k-subsets T. The induced basis is orthonormal for the Euclidean form.
struct WedgeVector {
  int ambient_dim = 0;
  int degree = 0;
  Vector coords;  // length C(ambient_dim, degree)

  double norm() const { return coords.norm(); }
};

/// Wedge product of k vectors in R^n. Coordinate at subset T is the k x k
/// minor of the stacked vectors on columns T; multilinear and alternating.
/// Throws InputError on dimension mismatch.
WedgeVector wedge(const std::vector<Vector>& vectors);

/// Same, with the vectors given as the rows of a k x n matrix.
WedgeVector wedge_rows(const Matrix& stacked);

/// ||pr_{W^perp}(v)||, computed as ||v ^ (w_1 ^ ... ^ w_k)|| / ||w_1 ^ ... ^ w_k||.
/// Throws DegenerateInputError when the w_i are dependent.
double proj_norm_via_wedge(const Vector& v, const std::vector<Vector>& w);

/// i-th coefficient (0-based) of pr_W(v) in the basis (w_1,...,w_k):
/// <w_1 ^ ... ^ v at slot i ^ ... ^ w_k, w_1 ^ ... ^ w_k> / ||w_1 ^ ... ^ w_k||^2.
double proj_coeff_via_wedge(const Vector& v, const std::vector<Vector>& w, int i);

// ---------------------------------------------------------------------------
// Symmetric eigenproblems
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  Vector eigenvalues;  // sorted descending
  Matrix eigenvectors; // columns, orthogonal; S = Q diag(l) Q^T
};

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
/// Throws InputError if s is not symmetric within 1e-10 relative.
SymmetricEigen sym_eigen(const Matrix& s);

/// Sorted-descending eigenvalues only.
Vector sym_eigenvalues(const Matrix& s);

}  // namespace maxflat

#endif
