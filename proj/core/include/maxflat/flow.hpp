#ifndef MAXFLAT_FLOW_HPP
#define MAXFLAT_FLOW_HPP

#include <optional>
#include <vector>

#include "maxflat/group.hpp"

namespace maxflat {

inline constexpr double kFlowLimitTol = 1e-6;
inline constexpr double kSpectrumDriftTol = 1e-8;
inline constexpr double kCAlphaSlack = 1e-10;
inline constexpr double kDualRouteTol = 1e-6;

/// The flow field X' = [E_k X, X] on symmetric traceless matrices, with
/// E_k X = U^T - U for U the strictly upper part of X. Output is symmetric
/// traceless; its diagonal has nonpositive prefix sums. Throws InputError
/// when X is not symmetric traceless within tolerance.
Matrix vector_field(const Matrix& x);

struct FlowState {
  double t = 0.0;
  Matrix x;
};

struct TrajectorySample {
  double t = 0.0;
  Matrix x;
  Vector spectrum;        // sorted descending
  Vector c_alpha;         // prefix sums of the diagonal
  double offdiag_norm = 0.0;

  FlowState state() const { return FlowState{t, x}; }
};

enum class TrajectoryStatus { ReachedLimit, ReachedTEnd };

struct Trajectory {
  std::vector<TrajectorySample> samples;  // strictly increasing times
  TrajectoryStatus status = TrajectoryStatus::ReachedTEnd;
  double spectral_drift = 0.0;      // max sorted-eigenvalue drift from t = 0
  double norm_drift = 0.0;          // max Frobenius-norm drift from t = 0
  double dual_route_residual = 0.0; // only set by flow_from
  int accepted_steps = 0;
  int rejected_steps = 0;
};

struct FlowControls {
  double t_end = 50.0;
  double sample_dt = 0.25;
  double local_error_tol = 1e-10;
  double limit_tol = kFlowLimitTol;  // halt when off-diagonal norm drops below
};

/// Integration horizon scaled to the slowest linearized decay rate: the
/// smallest adjacent gap of the sorted spectrum. Capped for near-singular
/// spectra.
double suggested_t_end(const CartanVector& h);

/// Carries the partial trajectory out of a failed integration.
class StiffnessError : public NumericalError {
 public:
  StiffnessError(const std::string& what, Trajectory partial)
      : NumericalError(what), partial_trajectory(std::move(partial)) {}
  Trajectory partial_trajectory;
};

/// Adaptive Dormand-Prince 5(4) integration of the flow from x0, with
/// projection back to the symmetric traceless space after every accepted
/// step and diagnostics at sample times. Halts early once the off-diagonal
/// norm drops below controls.limit_tol.
Trajectory integrate(const Matrix& x0, const FlowControls& controls);

/// Integrate from X0 = Ad_k(H) and cross-validate each sample against the
/// direct route Ad_{kappa(k exp(tH))}(H) while t <= 25 / max|H_i| (beyond
/// which the direct route overflows and the ODE continues alone). Throws
/// ConsistencyError when the two routes disagree above kDualRouteTol.
Trajectory flow_from(const Matrix& k, const CartanVector& h, const FlowControls& controls);

struct FlowReport {
  std::optional<CartanVector> limit;          // diagonal limit when converged
  std::optional<WeylElement> permutation;     // matched Weyl element (regular H)
  double convergence_time = -1.0;             // first sample time below limit_tol
  double match_residual = -1.0;               // distance to nearest orbit point
  double spectral_drift = 0.0;
  bool h_regular = false;
};

/// Match the trajectory endpoint against the Weyl orbit of H. For regular H
/// a successful match certifies convergence of the K-projection to the
/// normalizer-of-A cosets; for singular H only the orbit distance is
/// reported.
FlowReport limit_analysis(const Trajectory& traj, const CartanVector& h);

struct MonotonicityAudit {
  bool ok = false;
  double worst_violation = 0.0;   // largest upward move of any c_alpha
  double total_decrease = 0.0;    // sum over alpha of c_alpha(start) - c_alpha(end)
  bool start_diagonal = false;
};

/// Every c_alpha must be nonincreasing along samples within slack, with
/// strict total decrease unless the start is diagonal.
MonotonicityAudit monotonicity_audit(const Trajectory& traj);

/// Off-diagonal Frobenius norm.
double offdiagonal_norm(const Matrix& x);

}  // namespace maxflat

#endif
