#ifndef MAXFLAT_PARTITION_HPP
#define MAXFLAT_PARTITION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "maxflat/representation.hpp"

namespace maxflat {

/// Default relative support threshold: a weight component of a trailing
/// wedge line counts as present when its norm exceeds this fraction of the
/// whole wedge norm. Classification near class boundaries is threshold
/// dependent; the CLI exposes the knob.
inline constexpr double kSupportRelDefault = 1e-9;

/// Class signature of a group element: for every distinct weight lambda of
/// the representation, the set of weights of the s_lambda-th exterior power
/// on which the trailing wedge line has nonzero projection. Weights with
/// s_lambda = 0 keep an empty entry so signatures stay index-aligned.
struct OmegaSignature {
  struct Entry {
    Weight lambda;
    std::vector<Weight> support;  // canonically sorted
  };
  std::vector<Entry> entries;  // in rep distinct-weight order

  bool operator==(const OmegaSignature& other) const;
  bool operator!=(const OmegaSignature& other) const { return !(*this == other); }

  /// Stable text form (used for hashing/reporting).
  std::string to_string() const;
};

/// Precomputed per-representation data for classification: for every
/// distinct weight, the block of basis indices below it and the grouping of
/// exterior-power coordinates by weight. Built once per rep, immutable.
struct PartitionContext {
  struct Block {
    Weight lambda;
    std::vector<int> indices;                 // basis indices with weight < lambda
    std::vector<int> rows_at_lambda;          // basis indices with weight == lambda
    std::vector<Weight> subset_weights;       // per lexicographic subset of the block degree
    std::vector<Weight> distinct_subset_weights;
    std::vector<std::vector<int>> groups;     // subset indices per distinct weight
  };
  int rep_dim = 0;
  std::vector<Block> blocks;
};

PartitionContext make_partition_context(const WeightedRep& rep);

/// Classify a group element by the weight supports of its trailing wedge
/// lines.
OmegaSignature classify(const GroupElement& g, const WeightedRep& rep,
                        double support_rel = kSupportRelDefault);
OmegaSignature classify_with_context(const GroupElement& g, const WeightedRep& rep,
                                     const PartitionContext& ctx,
                                     double support_rel = kSupportRelDefault);

/// Classification of a raw invertible matrix (no det-1 gate); supports are
/// invariant under positive rescaling.
OmegaSignature classify_matrix(const Matrix& m, const WeightedRep& rep,
                               const PartitionContext& ctx,
                               double support_rel = kSupportRelDefault);

/// Union of supports over Haar-style random samples; converges to the
/// signature of the open dense generic class.
OmegaSignature generic_signature(const WeightedRep& rep, int sample_count,
                                 std::uint64_t seed,
                                 double support_rel = kSupportRelDefault);

/// classify(u a m g) == classify(g) for random unipotent u, positive
/// diagonal a with det 1, and diagonal-sign m with det 1.
bool left_invariance_check(const GroupElement& g, const WeightedRep& rep,
                           std::uint64_t seed, double a_scale = 1.0,
                           double support_rel = kSupportRelDefault);

// ---------------------------------------------------------------------------
// N-projection boundedness
// ---------------------------------------------------------------------------

/// Per-ray grid record and the triangle-inequality certificate. The
/// theoretical bound aggregates per-entry bounds of the form
/// max_{d_mu != 0} |<c_mu, d_mu>| / ||d_mu||^2 over trailing-wedge weight
/// components, which holds for every diagonal ray simultaneously.
struct NBoundReport {
  std::string g_id;
  int rep_dim = 0;
  double t_max = 0.0;
  int grid_points = 0;
  std::vector<CartanVector> rays;
  std::vector<std::vector<double>> grid_off_identity;  // [ray][grid]
  double observed_sup = 0.0;
  double theoretical_bound = 0.0;  // Frobenius aggregate of per-entry bounds
  double sl2_analytic_bound = -1.0;  // max(|a/c|, |b/d|) when n = 2 and rep = Std
  bool bounded = false;
};

NBoundReport n_bound_experiment(const GroupElement& g, const WeightedRep& rep,
                                const std::vector<CartanVector>& rays,
                                double t_max, int grid_points);

/// Matrix of per-entry triangle-inequality bounds for the unipotent factor
/// of rho(g) exp(t drho(H)): entry (i, j), i < j, bounds the (i, j) entry of
/// the N-part uniformly over all diagonal rays.
Matrix n_entry_bounds(const GroupElement& g, const WeightedRep& rep);

/// Unipotent Iwasawa factor of rho(g) exp(t drho(H)) through the
/// exterior-power form of the Gram-Schmidt coefficients; stable for any t
/// where the raw decomposition would overflow double precision.
Matrix n_part_along_ray(const GroupElement& g, const WeightedRep& rep,
                        const CartanVector& ray, double t);

/// Fraction of random samples landing in the generic class; expected 1.
double density_estimate(const WeightedRep& rep, int samples, std::uint64_t seed,
                        double support_rel = kSupportRelDefault);

/// Structured sampling evidence for whether the Std and Adjoint partitions
/// agree. Tallies pair classifications; asserts nothing.
struct RepIndependenceReport {
  int sample_count = 0;
  long both_same = 0;
  long both_different = 0;
  long std_same_adjoint_different = 0;
  long std_different_adjoint_same = 0;
};

RepIndependenceReport rep_independence_experiment(int n, int samples, std::uint64_t seed);

/// Random strictly upper unipotent element with Gaussian off-diagonal data.
Matrix random_unipotent(int n, RandomStream& rng);

/// Random diagonal +-1 matrix with determinant 1 (element of M).
Matrix random_sign_diagonal(int n, RandomStream& rng);

}  // namespace maxflat

#endif
