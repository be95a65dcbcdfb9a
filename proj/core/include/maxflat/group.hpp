#ifndef MAXFLAT_GROUP_HPP
#define MAXFLAT_GROUP_HPP

#include <utility>
#include <vector>

#include "maxflat/linalg.hpp"
#include "maxflat/rng.hpp"

namespace maxflat {

// Tolerances shared across the structure layer.
inline constexpr double kDetTol = 1e-10;          // |det - 1| for group elements
inline constexpr double kOrthogonalityTol = 1e-12;
inline constexpr double kReconstructionRel = 1e-10;
inline constexpr double kDistinctRel = 1e-9;      // coordinate distinctness, relative to ||H||
inline constexpr double kTraceRel = 1e-12;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Element of SL_n(R): real n x n matrix with determinant 1.
class GroupElement {
 public:
  explicit GroupElement(Matrix m);

  const Matrix& mat() const { return mat_; }
  int n() const { return static_cast<int>(mat_.rows()); }

  static GroupElement identity(int n) { return GroupElement(Matrix::Identity(n, n)); }

  /// Gaussian ensemble projected to determinant 1 (sign fixed by negating
  /// the first row when needed).
  static GroupElement random(int n, RandomStream& rng);

 private:
  Matrix mat_;
};

/// Traceless real n-vector: element of the Cartan space of diagonal
/// matrices. Houses flat directions and Iwasawa log-A projections.
class CartanVector {
 public:
  explicit CartanVector(Vector coords);

  const Vector& coords() const { return coords_; }
  int n() const { return static_cast<int>(coords_.size()); }
  double norm() const { return coords_.norm(); }

  /// Embed as a diagonal matrix.
  Matrix diagonal() const { return coords_.asDiagonal(); }

  /// exp of the embedded diagonal matrix: positive diagonal with det 1.
  Matrix exp_diagonal() const;

  static CartanVector zero(int n) { return CartanVector(Vector::Zero(n)); }

  /// Project an arbitrary vector to the traceless hyperplane.
  static CartanVector project(const Vector& v);

  bool operator==(const CartanVector& other) const { return coords_ == other.coords_; }

 private:
  Vector coords_;
};

/// Traceless n x n matrix: element of sl_n.
class LieAlgebraElement {
 public:
  explicit LieAlgebraElement(Matrix m);

  const Matrix& mat() const { return mat_; }
  int n() const { return static_cast<int>(mat_.rows()); }

 private:
  Matrix mat_;
};

/// Iwasawa factors g = n a k: unit upper-triangular n_part, positive
/// diagonal a_part with det 1, special-orthogonal k_part.
struct IwasawaFactors {
  Matrix n_part;
  Matrix a_part;
  Matrix k_part;

  Matrix reconstruct() const { return n_part * a_part * k_part; }
};

/// Lie algebra Iwasawa components X = nil + cartan + compact.
struct LieIwasawaParts {
  Matrix n_comp;  // strictly upper triangular
  Matrix a_comp;  // diagonal, traceless
  Matrix k_comp;  // antisymmetric
};

/// Restricted root data of sl_n. Roots are pairs (i, j), i != j, standing
/// for eps_i - eps_j; coroots use the trace form, H_alpha = E_ii - E_jj.
struct RootDatum {
  int n = 0;
  std::vector<std::pair<int, int>> roots;      // all i != j
  std::vector<std::pair<int, int>> positives;  // i < j
  std::vector<std::pair<int, int>> simples;    // (i, i+1)

  static RootDatum make(int n);

  /// H_alpha as a diagonal vector (+1 at i, -1 at j).
  Vector coroot(const std::pair<int, int>& alpha) const;

  /// All restricted root multiplicities are 1 for sl_n.
  int multiplicity(const std::pair<int, int>&) const { return 1; }

  /// alpha(H) = H_i - H_j.
  double pairing(const std::pair<int, int>& alpha, const CartanVector& h) const {
    return h.coords()[alpha.first] - h.coords()[alpha.second];
  }
};

/// Weyl group element: permutation of {0..n-1}.
struct WeylElement {
  std::vector<int> perm;

  /// Signed permutation matrix with determinant 1 (a representative in the
  /// normalizer of A inside SO(n)).
  Matrix orthogonal_representative() const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Iwasawa decomposition by bottom-up Gram-Schmidt on rows: w_n = row n,
/// w_{i-1} = row_{i-1} minus its projection onto span(rows i..n). The
/// factors are the unique NAK triple. Throws InputError for non-invertible
/// input.
IwasawaFactors iwasawa(const GroupElement& g);

/// Same Gram-Schmidt factorization for any invertible matrix with positive
/// determinant (a_part then carries det m instead of 1). The N-part is
/// invariant under positive rescaling of the input.
IwasawaFactors iwasawa_positive_det(const Matrix& m);

/// log of the Iwasawa A-part, as a traceless vector.
CartanVector iwasawa_height(const GroupElement& g);

/// X = n_comp + a_comp + k_comp exactly: the below-diagonal entry block L
/// goes to the compact part as L - L^T, its reflection joins the nil part.
LieIwasawaParts project_nak(const LieAlgebraElement& x);

/// Projection of X onto the root space of alpha = eps_i - eps_j, which for
/// sl_n is the coordinate line at entry (i, j).
double root_project(const LieAlgebraElement& x, const std::pair<int, int>& alpha);

/// All coordinates pairwise distinct beyond kDistinctRel * ||H||.
bool is_regular(const CartanVector& h);

/// Regular, and no proper nonempty subset of coordinates sums to zero
/// beyond tolerance. The proper-Levi subspaces of sl_n are exactly the
/// zero-block-sum subspaces, so this characterizes the generic set.
bool is_generic(const CartanVector& h);

/// Coordinates strictly decreasing.
bool in_positive_chamber(const CartanVector& h);

/// Coefficients of H in the simple coroot basis {E_ii - E_{i+1,i+1}}:
/// the prefix sums c_i = H_1 + ... + H_i, i = 1..n-1.
Vector c_alpha_coords(const CartanVector& h);

/// All coordinate permutations of H, deduplicated.
std::vector<CartanVector> weyl_orbit(const CartanVector& h);

/// All n! Weyl elements.
std::vector<WeylElement> weyl_group(int n);

/// Orthonormal basis of the traceless diagonal space, Gram-Schmidt on
/// (E_ii - E_{i+1,i+1}) in index order. Columns of the returned n x (n-1)
/// matrix are the basis vectors.
Matrix cartan_orthonormal_basis(int n);

/// Random traceless vector with Gaussian entries.
CartanVector random_cartan(int n, RandomStream& rng);

/// Random regular traceless vector whose sorted coordinates have adjacent
/// gaps of at least min_gap after normalization.
CartanVector random_regular_cartan(int n, RandomStream& rng, double min_gap = 0.2);

/// Random generic traceless vector (rejection sampling on is_generic).
CartanVector random_generic_cartan(int n, RandomStream& rng);

}  // namespace maxflat

#endif
