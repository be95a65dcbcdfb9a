#include "maxflat/height.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace maxflat {

namespace {

Matrix kappa(const Matrix& m) { return iwasawa_positive_det(m).k_part; }

Matrix flat_point(const HeightProblem& p, const CartanVector& t) {
  return p.g.mat() * t.exp_diagonal();
}

}  // namespace

double height(const HeightProblem& p, const CartanVector& t) {
  if (p.h0.n() != p.g.n() || t.n() != p.g.n())
    throw InputError("height: dimension mismatch");
  const IwasawaFactors f = iwasawa_positive_det(flat_point(p, t));
  // <H0, log a>: H0 is traceless, so the det-1 drift of the diagonal
  // factor cancels without explicit re-centering.
  double acc = 0.0;
  for (int i = 0; i < p.g.n(); ++i) acc += p.h0.coords()[i] * std::log(f.a_part(i, i));
  return acc;
}

CartanVector grad_height(const HeightProblem& p, const CartanVector& t) {
  const Matrix k = kappa(flat_point(p, t));
  const Matrix s = k.transpose() * p.h0.diagonal() * k;
  return CartanVector::project(s.diagonal());
}

Matrix hess_height(const HeightProblem& p, const CartanVector& t) {
  const int n = p.g.n();
  const Matrix k = kappa(flat_point(p, t));
  const Matrix basis = cartan_orthonormal_basis(n);

  // Conjugated basis directions Y_q = Ad_k(b_q); the quadratic form is
  // <H0, [Y, E_n(Y')]> = -2 sum_{i<j} (H0_i - H0_j) Y_ij Y'_ij for
  // symmetric arguments.
  std::vector<Matrix> conj(static_cast<size_t>(n - 1));
  for (int q = 0; q + 1 < n; ++q) {
    const Matrix b = basis.col(q).asDiagonal();
    conj[static_cast<size_t>(q)] = k * b * k.transpose();
  }

  Matrix hess(n - 1, n - 1);
  for (int pidx = 0; pidx + 1 < n; ++pidx) {
    for (int q = pidx; q + 1 < n; ++q) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          acc += (p.h0.coords()[i] - p.h0.coords()[j]) *
                 conj[static_cast<size_t>(pidx)](i, j) * conj[static_cast<size_t>(q)](i, j);
      hess(pidx, q) = hess(q, pidx) = -2.0 * acc;
    }
  }
  return hess;
}

// ---------------------------------------------------------------------------
// Trust-region Newton ascent
// ---------------------------------------------------------------------------

namespace {

// Exact solution of min_{||p|| <= radius} 0.5 p^T B p - g^T p for small
// dense symmetric B, via the eigendecomposition and a 1D search on the
// shift parameter.
Vector trust_region_step(const Matrix& b, const Vector& g, double radius) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  const Vector& evals = es.eigenvalues();
  const Vector ghat = es.eigenvectors().transpose() * g;
  const double lambda_min = evals.minCoeff();

  auto step_norm = [&](double shift) {
    double norm2 = 0.0;
    for (int i = 0; i < evals.size(); ++i) {
      const double denom = evals[i] + shift;
      norm2 += (ghat[i] * ghat[i]) / (denom * denom);
    }
    return std::sqrt(norm2);
  };

  // Interior Newton point when B is positive definite and the step fits.
  if (lambda_min > 1e-14 && step_norm(0.0) <= radius) {
    Vector phat(evals.size());
    for (int i = 0; i < evals.size(); ++i) phat[i] = ghat[i] / evals[i];
    return es.eigenvectors() * phat;
  }

  // Boundary solution: find shift > max(0, -lambda_min) with
  // ||p(shift)|| = radius.
  double lo = std::max(0.0, -lambda_min) + 1e-14;
  while (!(step_norm(lo) > radius) && lo < 1e12) {
    // Hard case: gradient (numerically) orthogonal to the bottom
    // eigenspace. Move along that eigenspace to reach the boundary.
    Vector phat(evals.size());
    for (int i = 0; i < evals.size(); ++i) phat[i] = ghat[i] / (evals[i] + lo);
    Vector p = es.eigenvectors() * phat;
    int bottom = 0;
    evals.minCoeff(&bottom);
    const Vector dir = es.eigenvectors().col(bottom);
    const double a2 = 1.0;
    const double b2 = 2.0 * p.dot(dir);
    const double c2 = p.squaredNorm() - radius * radius;
    const double disc = b2 * b2 - 4.0 * a2 * c2;
    if (disc >= 0.0) {
      const double tau = (-b2 + std::sqrt(disc)) / 2.0;
      return p + tau * dir;
    }
    lo *= 10.0;
  }
  double hi = std::max(lo * 2.0, 1.0);
  while (step_norm(hi) > radius) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (step_norm(mid) > radius) lo = mid; else hi = mid;
    if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
  }
  const double shift = 0.5 * (lo + hi);
  Vector phat(evals.size());
  for (int i = 0; i < evals.size(); ++i) phat[i] = ghat[i] / (evals[i] + shift);
  return es.eigenvectors() * phat;
}

struct StartOutcome {
  enum class Kind { Converged, Escaped, Exhausted } kind = Kind::Exhausted;
  Vector tau;         // final iterate in orthonormal coordinates
  double h = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

StartOutcome run_start(const HeightProblem& p, const Matrix& basis, Vector tau,
                       const CriticalPointOptions& opt) {
  StartOutcome out;
  double radius = opt.initial_radius;

  auto eval_h = [&](const Vector& coords) {
    return height(p, CartanVector(basis * coords));
  };

  double h = eval_h(tau);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const CartanVector t(basis * tau);
    const Vector grad = basis.transpose() * grad_height(p, t).coords();
    const double gnorm = grad.norm();
    if (!std::isfinite(h) || !std::isfinite(gnorm))
      throw NumericalError("find_critical: non-finite arithmetic");

    out.tau = tau;
    out.h = h;
    out.grad_norm = gnorm;
    out.iterations = iter;

    if (gnorm <= opt.grad_tol) {
      out.kind = StartOutcome::Kind::Converged;
      return out;
    }
    if (tau.norm() > opt.escape_radius && gnorm >= opt.escape_grad_floor &&
        grad.dot(tau) > 0.0) {
      // Height still increasing along the exit direction: no critical
      // point in reach.
      out.kind = StartOutcome::Kind::Escaped;
      return out;
    }

    const Matrix hess = hess_height(p, t);
    const Vector step = trust_region_step(-hess, grad, radius);
    const double predicted = grad.dot(step) + 0.5 * step.dot(hess * step);
    if (!(predicted > 0.0) || step.norm() <= 1e-16) {
      radius = std::min(radius * 2.0, opt.max_radius);
      continue;
    }
    const double h_new = eval_h(tau + step);
    const double ratio = (h_new - h) / predicted;
    if (ratio > opt.accept_ratio) {
      tau += step;
      h = h_new;
    }
    if (ratio < 0.25) {
      radius = std::max(radius * 0.25, 1e-12);
    } else if (ratio > 0.75 && step.norm() > 0.99 * radius) {
      radius = std::min(radius * 2.0, opt.max_radius);
    }
  }
  out.kind = StartOutcome::Kind::Exhausted;
  return out;
}

}  // namespace

CriticalPointReport find_critical(const HeightProblem& p, const CriticalPointOptions& opt) {
  const int n = p.g.n();
  const Matrix basis = cartan_orthonormal_basis(n);
  RandomStream rng(opt.seed);

  CriticalPointReport report;
  report.h0_generic = is_generic(p.h0);
  report.h0_positive_chamber = in_positive_chamber(p.h0);

  std::vector<StartOutcome> converged;
  int total_iterations = 0;
  for (int s = 0; s < opt.starts; ++s) {
    Vector tau0 = Vector::Zero(n - 1);
    if (s > 0) tau0 = opt.start_spread * rng.gaussian_vector(n - 1);
    StartOutcome out = run_start(p, basis, tau0, opt);
    total_iterations += out.iterations;
    switch (out.kind) {
      case StartOutcome::Kind::Converged:
        ++report.converged_starts;
        converged.push_back(std::move(out));
        break;
      case StartOutcome::Kind::Escaped:
        ++report.escaped_starts;
        if (!report.escape_direction && out.tau.norm() > 0.0)
          report.escape_direction = Vector(out.tau / out.tau.norm());
        break;
      case StartOutcome::Kind::Exhausted:
        break;
    }
  }
  report.iterations = total_iterations;

  if (!converged.empty()) {
    // Lowest-index success is the canonical answer; agreement across all
    // converged starts backs uniqueness.
    const StartOutcome& best = converged.front();
    report.multistart_agreement = true;
    for (const auto& other : converged)
      if ((other.tau - best.tau).norm() > opt.agreement_tol)
        report.multistart_agreement = false;

    const CartanVector t_star(basis * best.tau);
    const Matrix hess = hess_height(p, t_star);
    const Vector evals = sym_eigenvalues(hess);
    report.hessian_eigenvalues.assign(evals.data(), evals.data() + evals.size());
    const bool negdef = evals.maxCoeff() < 0.0;

    report.status = negdef ? CriticalStatus::Found : CriticalStatus::NotFound;
    report.a_star = t_star;
    report.h_star = best.h;
    report.grad_norm = best.grad_norm;

    report.maximality_ok = true;
    for (int probe = 0; probe < opt.probe_count; ++probe) {
      Vector dir = rng.gaussian_vector(n - 1);
      const double norm = dir.norm();
      if (norm < 1e-12) continue;
      dir *= opt.probe_radius * rng.uniform01() / norm;
      const double h_probe = height(p, CartanVector(basis * (best.tau + dir)));
      if (h_probe > report.h_star + 1e-8) report.maximality_ok = false;
    }
    return report;
  }

  report.status = (report.escaped_starts > 0) ? CriticalStatus::NotFound
                                              : CriticalStatus::Escaped;
  return report;
}

// ---------------------------------------------------------------------------
// The critical locus on SO(n)
// ---------------------------------------------------------------------------

Matrix polar_orthogonal(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix exp_antisymmetric(const Matrix& x) {
  if ((x + x.transpose()).norm() > 1e-8 * std::max(1.0, x.norm()))
    throw InputError("exp_antisymmetric: input not antisymmetric");
  return polar_orthogonal(x.exp());
}

CartanVector f_map(const Matrix& k, const CartanVector& h0) {
  const Matrix s = k.transpose() * h0.diagonal() * k;
  return CartanVector::project(s.diagonal());
}

double g_map(const Matrix& k, const CartanVector& h0) {
  return f_map(k, h0).coords().squaredNorm();
}

Matrix riemannian_grad_g(const Matrix& k, const CartanVector& h0) {
  const Matrix s = k.transpose() * h0.diagonal() * k;
  const Matrix f = f_map(k, h0).diagonal();
  return 2.0 * (s * f - f * s);
}

namespace {

// One descent run from a fixed starting orthogonal matrix. Returns the best
// residual reached; fills k with the final iterate.
double descend_to_c_point(Matrix& k, const CartanVector& h0, RandomStream& rng,
                          int max_iterations, double accept_tol) {
  const int n = h0.n();
  const double h0sq = h0.coords().squaredNorm();

  std::vector<std::pair<int, int>> so_basis;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) so_basis.emplace_back(p, q);

  double value = g_map(k, h0);
  double last_milestone = value;
  int since_milestone = 0;
  int polish_left = 4;  // extra Gauss-Newton steps past the acceptance
                        // threshold, driving the zero to the machine floor

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (value <= accept_tol && polish_left-- <= 0) return value;

    const Matrix s = k.transpose() * h0.diagonal() * k;
    const Vector f = CartanVector::project(s.diagonal()).coords();

    bool improved = false;
    if (value < 1e-2 * h0sq) {
      // Gauss-Newton polish: solve J x = -f in least squares, where the
      // column of J for the rotation plane (p, q) is -2 S_pq (e_p - e_q).
      Matrix jac(n, static_cast<int>(so_basis.size()));
      for (size_t c = 0; c < so_basis.size(); ++c) {
        const auto [p, q] = so_basis[c];
        Vector col = Vector::Zero(n);
        col[p] = -2.0 * s(p, q);
        col[q] = 2.0 * s(p, q);
        jac.col(static_cast<Eigen::Index>(c)) = col;
      }
      const Vector x = jac.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-f);
      Matrix step = Matrix::Zero(n, n);
      for (size_t c = 0; c < so_basis.size(); ++c) {
        const auto [p, q] = so_basis[c];
        step(p, q) += x[static_cast<Eigen::Index>(c)];
        step(q, p) -= x[static_cast<Eigen::Index>(c)];
      }
      const Matrix trial = polar_orthogonal(k * step.exp());
      const double trial_value = g_map(trial, h0);
      if (trial_value < value) {
        k = trial;
        value = trial_value;
        improved = true;
      }
    }

    if (!improved) {
      const Matrix grad = riemannian_grad_g(k, h0);
      const double gnorm = grad.norm();
      if (gnorm > kAbsFloor) {
        double eta = 0.25 / std::max(h0.norm(), 1e-6);
        const Matrix dir = -grad / gnorm;
        for (int bt = 0; bt < 30; ++bt) {
          const Matrix trial = polar_orthogonal(k * (eta * dir).exp());
          const double trial_value = g_map(trial, h0);
          if (trial_value < value - 1e-4 * eta * gnorm) {
            k = trial;
            value = trial_value;
            improved = true;
            break;
          }
          eta *= 0.5;
        }
      }
    }

    // Stall handling: a flat stretch at positive value means a saddle
    // (zero-value points are the only minima); kick and continue.
    ++since_milestone;
    if (since_milestone >= 10) {
      if (value > accept_tol && value > 0.999 * last_milestone) {
        Matrix kick = Matrix::Zero(n, n);
        for (const auto& [p, q] : so_basis) {
          const double c = 1e-2 * rng.gaussian();
          kick(p, q) += c;
          kick(q, p) -= c;
        }
        k = polar_orthogonal(k * kick.exp());
        value = g_map(k, h0);
      }
      last_milestone = value;
      since_milestone = 0;
    }
  }
  return value;
}

}  // namespace

CPoint find_C_point(const CartanVector& h0, std::uint64_t seed, int restarts) {
  const int n = h0.n();
  const double accept_tol = 1e-12 * h0.coords().squaredNorm();
  RandomStream root(seed);

  double best_residual = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    RandomStream rng = root.fork(static_cast<std::uint64_t>(r));
    Matrix k = haar_orthogonal(n, rng);
    const double residual = descend_to_c_point(k, h0, rng, 600, accept_tol);
    best_residual = std::min(best_residual, residual);
    if (residual <= accept_tol) {
      CPoint point;
      point.k = std::move(k);
      point.residual = residual;
      point.jacobian_rank = C_tangent_rank(point.k, h0);
      return point;
    }
  }
  throw NumericalError("find_C_point: restart budget exhausted, best residual " +
                       std::to_string(best_residual));
}

int C_tangent_rank(const Matrix& k, const CartanVector& h0) {
  const int n = h0.n();
  const Matrix s = k.transpose() * h0.diagonal() * k;
  const Matrix basis = cartan_orthonormal_basis(n);

  Matrix map(n - 1, n * (n - 1) / 2);
  int c = 0;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q, ++c) {
      Vector col = Vector::Zero(n);
      col[p] = -2.0 * s(p, q);
      col[q] = 2.0 * s(p, q);
      map.col(c) = basis.transpose() * col;
    }
  }
  const Vector sv = map.jacobiSvd().singularValues();
  if (sv.size() == 0 || sv[0] <= kAbsFloor) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-8 * sv[0]) ++rank;
  return rank;
}

std::vector<Matrix> level_set_sample(const CartanVector& h0, const CartanVector& a,
                                     int count, std::uint64_t seed) {
  std::vector<Matrix> out;
  const Matrix a_inv_exp = CartanVector(-a.coords()).exp_diagonal();
  for (int i = 0; i < count; ++i) {
    const CPoint c = find_C_point(h0, derive_seed(seed, static_cast<std::uint64_t>(i)), 20);
    out.push_back(iwasawa_positive_det(c.k * a_inv_exp).k_part);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank-2 constructions and identities
// ---------------------------------------------------------------------------

Matrix sl3_zero_diagonal(const CartanVector& h0) {
  if (h0.n() != 3) throw InputError("sl3_zero_diagonal: need n = 3");
  const double a = h0.coords()[0], b = h0.coords()[1], c = h0.coords()[2];
  const double sum_sq = (a * a + b * b + c * c) / 2.0;  // x^2 + y^2 + z^2
  const double product = a * b * c;                     // 2xyz

  Matrix x = Matrix::Zero(3, 3);
  if (sum_sq <= kAbsFloor) return x;

  // Choose x = y; then u = x^2 solves u^2 (sum_sq - 2u) = product^2 / 4 on
  // [0, sum_sq/3], where the cubic is increasing and reaches its maximum
  // sum_sq^3/27 >= product^2/4 (the traceless cube-mean inequality).
  const double target = product * product / 4.0;
  double lo = 0.0, hi = sum_sq / 3.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double val = mid * mid * (sum_sq - 2.0 * mid);
    if (val < target) lo = mid; else hi = mid;
  }
  const double u = 0.5 * (lo + hi);
  const double xy = std::sqrt(std::max(u, 0.0));
  const double w = std::max(sum_sq - 2.0 * u, 0.0);
  double z = std::sqrt(w);
  if (product < 0.0) z = -z;

  x(0, 1) = x(1, 0) = xy;
  x(0, 2) = x(2, 0) = xy;
  x(1, 2) = x(2, 1) = z;
  return x;
}

AmGmResult am_gm_check(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
  if (std::abs(a + b + c) > 1e-12 * scale)
    throw InputError("am_gm_check: input triple is not traceless");
  const double mean_sq = (a * a + b * b + c * c) / 3.0;
  const double slack = mean_sq * mean_sq * mean_sq - 2.0 * (a * a) * (b * b) * (c * c);
  const double tol = 1e-12 * std::max(1.0, mean_sq * mean_sq * mean_sq);
  return AmGmResult{slack >= -tol, slack};
}

DimIdentityReport dim_identity_check(int n) {
  if (n < 2) throw InputError("dim_identity_check: need n >= 2");
  DimIdentityReport rep;
  rep.n = n;
  rep.sum_root_multiplicities = n * (n - 1) / 2;
  rep.dim_k = n * (n - 1) / 2;
  rep.dim_m = 0;
  rep.dim_a = n - 1;
  rep.difference_identity = (rep.dim_k - rep.dim_m == rep.sum_root_multiplicities);
  rep.equality_with_dim_a = (rep.dim_k - rep.dim_m == rep.dim_a);
  return rep;
}

CommonCriticalReport common_critical_experiment(const CartanVector& h0,
                                                const CartanVector& h0_prime,
                                                std::uint64_t seed) {
  if (h0.n() != 3 || h0_prime.n() != 3)
    throw InputError("common_critical_experiment: need n = 3");

  const int n = 3;
  RandomStream root(seed);
  auto objective = [&](const Matrix& k) { return g_map(k, h0) + g_map(k, h0_prime); };

  CommonCriticalReport report;
  report.restarts = 24;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < report.restarts; ++r) {
    RandomStream rng = root.fork(static_cast<std::uint64_t>(r));
    Matrix k = haar_orthogonal(n, rng);
    double value = objective(k);
    for (int iter = 0; iter < 400; ++iter) {
      const Matrix grad = riemannian_grad_g(k, h0) + riemannian_grad_g(k, h0_prime);
      const double gnorm = grad.norm();
      if (gnorm < 1e-12) break;
      double eta = 0.25 / std::max(1.0, h0.norm() + h0_prime.norm());
      const Matrix dir = -grad / gnorm;
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt) {
        const Matrix trial = polar_orthogonal(k * (eta * dir).exp());
        const double trial_value = objective(trial);
        if (trial_value < value - 1e-4 * eta * gnorm) {
          k = trial;
          value = trial_value;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    best = std::min(best, value);
  }
  report.infimum = best;

  try {
    report.h0_floor = find_C_point(h0, seed ^ 0x5eedULL, 20).residual;
  } catch (const NumericalError&) {
    report.h0_floor = -1.0;
  }
  return report;
}

}  // namespace maxflat
