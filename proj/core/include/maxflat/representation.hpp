#ifndef MAXFLAT_REPRESENTATION_HPP
#define MAXFLAT_REPRESENTATION_HPP

#include <string>
#include <vector>

#include "maxflat/group.hpp"

namespace maxflat {

/// Integer weight vector in Z^n; eps_i is the i-th coordinate functional on
/// the diagonal Cartan space.
using Weight = Eigen::VectorXi;

/// Pairing of a weight with a Cartan vector: dot product.
double weight_pairing(const Weight& w, const CartanVector& h);

/// mu < lambda in root order: lambda - mu is a nonzero nonnegative integer
/// combination of the simple roots eps_i - eps_{i+1}. Equivalently, all
/// prefix sums of lambda - mu are >= 0, the total is 0, and lambda != mu.
bool weight_lt(const Weight& mu, const Weight& lambda);

/// Weight-graded representation of SL_n(R) with an Iwasawa-compatible
/// basis: images of N, A and SO(n) are respectively upper unipotent,
/// positive diagonal, and orthogonal. Basis vectors are sorted by
/// non-increasing weight under a fixed linear extension of root order
/// (dot with the dominant vector (n-1, n-3, ..., -(n-1)), ties broken
/// lexicographically by weight vector, then by construction index).
class WeightedRep {
 public:
  enum class Kind { Std, Adjoint };

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int group_n() const { return n_; }
  int dim() const { return static_cast<int>(weights_.size()); }

  const std::vector<Weight>& basis_weights() const { return weights_; }
  const Weight& weight(int i) const { return weights_[static_cast<size_t>(i)]; }

  /// Distinct weights, in the order they first occur in the sorted basis.
  const std::vector<Weight>& distinct_weights() const { return distinct_; }

  /// Matrix of the representation in the sorted basis (columns are images
  /// of basis vectors). Rows are the images under the transpose right
  /// action, which is what the trailing-wedge machinery consumes.
  Matrix apply(const GroupElement& g) const;

  /// Same map on a raw invertible matrix, skipping the det-1 gate. Used by
  /// classification stress paths where the determinant of a product is
  /// exactly 1 mathematically but not evaluable at 1e-10 accuracy.
  Matrix apply_matrix(const Matrix& m) const;

  /// For the adjoint representation, the basis matrices of sl_n
  /// (orthonormal under the Frobenius form). Empty for Std.
  const std::vector<Matrix>& basis_matrices() const { return basis_mats_; }

  static WeightedRep std_rep(int n);
  static WeightedRep adjoint_rep(int n);

 private:
  WeightedRep() = default;

  Kind kind_ = Kind::Std;
  std::string name_;
  int n_ = 0;
  std::vector<Weight> weights_;
  std::vector<Weight> distinct_;
  std::vector<Matrix> basis_mats_;  // adjoint only
};

/// s_lambda and the index list of basis vectors whose weight is < lambda
/// in root order. Throws InputError if lambda is not a weight of rep.
struct BlockBelow {
  int s_lambda = 0;
  std::vector<int> indices;
};
BlockBelow block_below(const Weight& lambda, const WeightedRep& rep);

}  // namespace maxflat

#endif
