#ifndef MAXFLAT_HEIGHT_HPP
#define MAXFLAT_HEIGHT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "maxflat/group.hpp"

namespace maxflat {

// ---------------------------------------------------------------------------
// Height function along a maximal flat
// ---------------------------------------------------------------------------

/// The function t |-> <H0, H(g exp t)> on the Cartan space, with the trace
/// pairing on diagonal matrices.
struct HeightProblem {
  CartanVector h0;
  GroupElement g;
};

double height(const HeightProblem& p, const CartanVector& t);

/// Analytic gradient: the traceless diagonal of k^T H0 k with
/// k = kappa(g exp t), as a Cartan vector.
CartanVector grad_height(const HeightProblem& p, const CartanVector& t);

/// Analytic Hessian as a symmetric (n-1) x (n-1) matrix in the fixed
/// orthonormal basis of the traceless diagonal space: the quadratic form
/// H |-> <H0, [Ad_k H, E_n(Ad_k H)]>.
Matrix hess_height(const HeightProblem& p, const CartanVector& t);

// ---------------------------------------------------------------------------
// Critical point search (trust-region Newton ascent)
// ---------------------------------------------------------------------------

enum class CriticalStatus { Found, NotFound, Escaped };

struct CriticalPointOptions {
  int starts = 8;
  std::uint64_t seed = 0;
  int max_iterations = 250;
  double grad_tol = 1e-9;
  double escape_radius = 40.0;       // ||t|| beyond which a start is declared escaped
  double escape_grad_floor = 1e-6;   // escape requires gradient norm above this
  double initial_radius = 1.0;
  double max_radius = 8.0;
  double accept_ratio = 0.1;         // actual/predicted acceptance threshold
  double start_spread = 3.0;
  int probe_count = 200;             // maximality probes around the optimum
  double probe_radius = 10.0;
  double agreement_tol = 1e-6;
};

struct CriticalPointReport {
  CriticalStatus status = CriticalStatus::NotFound;
  std::optional<CartanVector> a_star;  // log-coordinates of the critical point
  double h_star = 0.0;
  double grad_norm = 0.0;
  std::vector<double> hessian_eigenvalues;  // sorted descending
  int iterations = 0;
  int converged_starts = 0;
  int escaped_starts = 0;
  bool multistart_agreement = false;
  bool maximality_ok = false;
  std::optional<Vector> escape_direction;  // unit exit direction (orthonormal coords)
  bool h0_generic = false;
  bool h0_positive_chamber = false;
};

CriticalPointReport find_critical(const HeightProblem& p, const CriticalPointOptions& opt);

// ---------------------------------------------------------------------------
// The critical locus on the orthogonal group
// ---------------------------------------------------------------------------

/// f(k) = traceless diagonal of Ad_{k^{-1}} H0 = diag(k^T H0 k).
CartanVector f_map(const Matrix& k, const CartanVector& h0);

/// g(k) = ||f(k)||^2.
double g_map(const Matrix& k, const CartanVector& h0);

/// Gradient of g for right-invariant perturbations k exp(eps X): the
/// antisymmetric matrix G with <G, X>_F = -2 <[X, Ad_{k^{-1}} H0], f(k)>
/// for all antisymmetric X; explicitly G = 2 [Ad_{k^{-1}} H0, diag f(k)].
Matrix riemannian_grad_g(const Matrix& k, const CartanVector& h0);

struct CPoint {
  Matrix k;
  double residual = 0.0;  // g value at k
  int jacobian_rank = 0;
};

/// Descent to a zero of g on SO(n): gradient steps with backtracking, a
/// Gauss-Newton polish near the floor, random tangent kicks on stalls
/// (critical points with positive value are saddles), independent restarts.
/// Throws NumericalError when the restart budget is exhausted.
CPoint find_C_point(const CartanVector& h0, std::uint64_t seed, int restarts = 20);

/// Numerical rank of the linearization X |-> -E_a([X, Ad_{k^{-1}} H0]) from
/// antisymmetric matrices to the traceless diagonal space; equals n-1 at
/// accepted points for generic H0.
int C_tangent_rank(const Matrix& k, const CartanVector& h0);

/// kappa(c exp(-a)) for accepted zeros c: elements whose height function
/// has its critical point at a.
std::vector<Matrix> level_set_sample(const CartanVector& h0, const CartanVector& a,
                                     int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Rank-2 constructions and identities
// ---------------------------------------------------------------------------

/// Symmetric 3x3 matrix with zero diagonal, isospectral with diag(h0):
/// off-diagonals (x, y, z) solve x^2+y^2+z^2 = (a^2+b^2+c^2)/2 and
/// 2xyz = abc, via a cubic for the squared values.
Matrix sl3_zero_diagonal(const CartanVector& h0);

struct AmGmResult {
  bool holds = false;
  double slack = 0.0;  // ((a^2+b^2+c^2)/3)^3 - 2 a^2 b^2 c^2
};

/// The cube-mean inequality for traceless triples; equality exactly at
/// permutations of multiples of (1, 1, -2). Throws InputError when
/// a + b + c != 0.
AmGmResult am_gm_check(double a, double b, double c);

struct DimIdentityReport {
  int n = 0;
  int sum_root_multiplicities = 0;  // n(n-1)/2
  int dim_k = 0;                     // dim SO(n)
  int dim_m = 0;                     // 0 for sl_n
  int dim_a = 0;                     // n - 1
  bool difference_identity = false;  // dim K - dim M == sum of multiplicities
  bool equality_with_dim_a = false;  // holds iff n == 2
};

DimIdentityReport dim_identity_check(int n);

struct CommonCriticalReport {
  double infimum = 0.0;           // min of g(.,H0) + g(.,H0') found
  double h0_floor = 0.0;          // min of g(.,H0) alone, for scale
  int restarts = 0;
};

/// Minimize g(., H0) + g(., H0') over SO(3); a positive floor is evidence
/// that no flat has a common critical point for non-proportional pairs.
CommonCriticalReport common_critical_experiment(const CartanVector& h0,
                                                const CartanVector& h0_prime,
                                                std::uint64_t seed);

/// Orthogonal polar factor (projection of an invertible matrix to the
/// nearest orthogonal matrix).
Matrix polar_orthogonal(const Matrix& m);

/// Exponential of an antisymmetric matrix (lands in SO(n)).
Matrix exp_antisymmetric(const Matrix& x);

}  // namespace maxflat

#endif
