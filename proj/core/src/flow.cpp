#include "maxflat/flow.hpp"

#include <algorithm>
#include <cmath>

namespace maxflat {

double offdiagonal_norm(const Matrix& x) {
  double acc = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      if (i != j) acc += x(i, j) * x(i, j);
  return std::sqrt(acc);
}

namespace {

void require_p_element(const Matrix& x) {
  if (x.rows() != x.cols()) throw InputError("flow: matrix not square");
  if (!all_finite(x)) throw InputError("flow: non-finite entries");
  const double scale = std::max(x.norm(), 1.0);
  if ((x - x.transpose()).norm() > 1e-10 * scale)
    throw InputError("flow: matrix not symmetric");
  if (std::abs(x.trace()) > 1e-12 * scale) throw InputError("flow: matrix not traceless");
}

// Field evaluation without revalidation; integrator snaps iterates back to
// the symmetric traceless space after every accepted step.
Matrix field_raw(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  Matrix upper = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper(i, j) = x(i, j);
  const Matrix compact = upper.transpose() - upper;
  return compact * x - x * compact;
}

Matrix project_to_p(const Matrix& x) {
  Matrix s = 0.5 * (x + x.transpose());
  const double shift = s.trace() / s.rows();
  for (int i = 0; i < s.rows(); ++i) s(i, i) -= shift;
  return s;
}

Vector prefix_sums(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  Vector c(n - 1);
  double run = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    run += x(i, i);
    c[i] = run;
  }
  return c;
}

TrajectorySample make_sample(double t, const Matrix& x) {
  TrajectorySample s;
  s.t = t;
  s.x = x;
  s.spectrum = sym_eigenvalues(x);
  s.c_alpha = prefix_sums(x);
  s.offdiag_norm = offdiagonal_norm(x);
  return s;
}

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

struct StepResult {
  Matrix x_new;
  double error = 0.0;
};

StepResult dopri_step(const Matrix& x, const Matrix& k1, double h) {
  const Matrix k2 = field_raw(x + h * kA21 * k1);
  const Matrix k3 = field_raw(x + h * (kA31 * k1 + kA32 * k2));
  const Matrix k4 = field_raw(x + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
  const Matrix k5 = field_raw(x + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
  const Matrix k6 =
      field_raw(x + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
  StepResult out;
  out.x_new = x + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
  const Matrix k7 = field_raw(out.x_new);
  const Matrix err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
  out.error = err.norm();
  return out;
}

}  // namespace

Matrix vector_field(const Matrix& x) {
  require_p_element(x);
  return field_raw(x);
}

double suggested_t_end(const CartanVector& h) {
  Vector sorted = h.coords();
  std::sort(sorted.data(), sorted.data() + sorted.size());
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < sorted.size(); ++i)
    gap = std::min(gap, sorted[i + 1] - sorted[i]);
  if (!(gap > 0.05)) return 1000.0;
  return std::min(1000.0, std::max(50.0, 50.0 / gap));
}

Trajectory integrate(const Matrix& x0, const FlowControls& controls) {
  require_p_element(x0);
  Trajectory traj;

  Matrix x = project_to_p(x0);
  double t = 0.0;
  traj.samples.push_back(make_sample(t, x));

  const Vector spectrum0 = traj.samples.front().spectrum;
  const double norm0 = x.norm();
  const double scale = std::max(norm0, 1.0);

  double next_sample = controls.sample_dt;
  double h = std::min(0.01, controls.sample_dt);
  const double t_eps = 1e-10 * std::max(1.0, controls.t_end);

  if (traj.samples.front().offdiag_norm < controls.limit_tol) {
    traj.status = TrajectoryStatus::ReachedLimit;
    return traj;
  }

  while (t < controls.t_end - t_eps) {
    const double h_try = std::min({h, controls.t_end - t, next_sample - t});
    const Matrix f1 = field_raw(x);
    const StepResult step = dopri_step(x, f1, h_try);
    if (!all_finite(step.x_new))
      throw StiffnessError("integrate: non-finite iterate", traj);

    const double tol = controls.local_error_tol * scale;
    const bool accepted = step.error <= tol;
    if (accepted) {
      t += h_try;
      x = project_to_p(step.x_new);
      ++traj.accepted_steps;

      if (t >= next_sample - t_eps || t >= controls.t_end - t_eps) {
        TrajectorySample sample = make_sample(t, x);
        traj.spectral_drift =
            std::max(traj.spectral_drift, (sample.spectrum - spectrum0).cwiseAbs().maxCoeff());
        traj.norm_drift = std::max(traj.norm_drift, std::abs(x.norm() - norm0));
        const double offdiag = sample.offdiag_norm;
        traj.samples.push_back(std::move(sample));
        while (next_sample <= t + t_eps) next_sample += controls.sample_dt;
        if (offdiag < controls.limit_tol) {
          traj.status = TrajectoryStatus::ReachedLimit;
          return traj;
        }
      }
    } else {
      ++traj.rejected_steps;
    }

    // Classical step control with safety margin.
    const double grow =
        (step.error > 0.0) ? 0.9 * std::pow(tol / step.error, 0.2) : 5.0;
    const double proposal = h_try * std::clamp(grow, 0.1, 5.0);
    if (accepted && h_try < h) {
      // A boundary-capped accepted step must not shrink the natural step.
      h = std::max(h, proposal);
    } else {
      h = proposal;
    }
    if (h < 1e-13 * std::max(1.0, t))
      throw StiffnessError("integrate: step size underflow at t=" + std::to_string(t), traj);
  }
  traj.status = TrajectoryStatus::ReachedTEnd;
  return traj;
}

Trajectory flow_from(const Matrix& k, const CartanVector& h, const FlowControls& controls) {
  const int n = h.n();
  if (k.rows() != n || k.cols() != n) throw InputError("flow_from: dimension mismatch");
  if ((k.transpose() * k - Matrix::Identity(n, n)).norm() > 1e-8)
    throw InputError("flow_from: k is not orthogonal");

  const Matrix x0 = k * h.diagonal() * k.transpose();
  Trajectory traj = integrate(project_to_p(x0), controls);

  // Dual route: the flow is by definition the conjugated Cartan direction
  // along the K-projection of the geodesic; both computations must agree.
  // The K-projection is evaluated incrementally through the cocycle
  // identity kappa(g e^{(t+s)H}) = kappa(kappa(g e^{tH}) e^{sH}), which
  // keeps every decomposition well conditioned; a single decomposition at
  // large t would be beyond double precision. The direct route is still
  // capped at t <= 25/max|H_i|, past which the ODE continues alone.
  const double h_max = h.coords().cwiseAbs().maxCoeff();
  const double t_cap = (h_max > kAbsFloor) ? 25.0 / h_max : controls.t_end;
  Matrix k_direct = k;
  double t_prev = 0.0;
  for (const auto& sample : traj.samples) {
    if (sample.t > t_cap) break;
    Vector scale(n);
    for (int i = 0; i < n; ++i) scale[i] = std::exp((sample.t - t_prev) * h.coords()[i]);
    k_direct = iwasawa_positive_det(k_direct * scale.asDiagonal()).k_part;
    t_prev = sample.t;
    const Matrix direct = k_direct * h.diagonal() * k_direct.transpose();
    const double residual = (direct - sample.x).norm();
    traj.dual_route_residual = std::max(traj.dual_route_residual, residual);
    if (residual > kDualRouteTol)
      throw ConsistencyError("flow_from: ODE and Iwasawa routes disagree at t=" +
                             std::to_string(sample.t) + " by " + std::to_string(residual));
  }
  return traj;
}

FlowReport limit_analysis(const Trajectory& traj, const CartanVector& h) {
  if (traj.samples.empty()) throw InputError("limit_analysis: empty trajectory");
  FlowReport report;
  report.spectral_drift = traj.spectral_drift;
  report.h_regular = is_regular(h);

  for (const auto& sample : traj.samples) {
    if (sample.offdiag_norm < kFlowLimitTol) {
      report.convergence_time = sample.t;
      break;
    }
  }

  const TrajectorySample& last = traj.samples.back();
  if (last.offdiag_norm >= kFlowLimitTol) return report;  // no limit reached

  const Vector diag = last.x.diagonal();
  const auto orbit = weyl_orbit(h);
  double best = std::numeric_limits<double>::infinity();
  size_t best_index = 0;
  for (size_t i = 0; i < orbit.size(); ++i) {
    const double dist = (orbit[i].coords() - diag).norm();
    if (dist < best) {
      best = dist;
      best_index = i;
    }
  }
  report.match_residual = best;
  if (best <= kFlowLimitTol) {
    report.limit = orbit[best_index];
    if (report.h_regular) {
      // Recover the permutation: limit[i] == h[perm[i]].
      const int n = h.n();
      std::vector<int> perm(static_cast<size_t>(n), -1);
      std::vector<bool> used(static_cast<size_t>(n), false);
      for (int i = 0; i < n; ++i) {
        int arg = -1;
        double nearest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
          if (used[static_cast<size_t>(j)]) continue;
          const double d = std::abs(orbit[best_index].coords()[i] - h.coords()[j]);
          if (d < nearest) {
            nearest = d;
            arg = j;
          }
        }
        perm[static_cast<size_t>(i)] = arg;
        used[static_cast<size_t>(arg)] = true;
      }
      report.permutation = WeylElement{perm};
    }
  }
  return report;
}

MonotonicityAudit monotonicity_audit(const Trajectory& traj) {
  if (traj.samples.empty()) throw InputError("monotonicity_audit: empty trajectory");
  MonotonicityAudit audit;
  audit.start_diagonal = traj.samples.front().offdiag_norm <= 1e-12;

  double worst = 0.0;
  for (size_t i = 1; i < traj.samples.size(); ++i) {
    const Vector& prev = traj.samples[i - 1].c_alpha;
    const Vector& cur = traj.samples[i].c_alpha;
    worst = std::max(worst, (cur - prev).maxCoeff());
  }
  audit.worst_violation = worst;

  const Vector start = traj.samples.front().c_alpha;
  const Vector end = traj.samples.back().c_alpha;
  audit.total_decrease = (start - end).sum();

  audit.ok = worst <= kCAlphaSlack &&
             (audit.start_diagonal || audit.total_decrease > 0.0);
  return audit;
}

}  // namespace maxflat
