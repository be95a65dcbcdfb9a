#include "maxflat/verify.hpp"

#include <cmath>

#include "maxflat/flow.hpp"
#include "maxflat/height.hpp"
#include "maxflat/partition.hpp"

namespace maxflat {

namespace {

CheckResult iwasawa_reconstruction(const VerifyOptions& opt) {
  CheckResult check{"iwasawa.reconstruction", true, {}};
  RandomStream rng(derive_seed(opt.seed, 101));
  double worst_recon = 0.0, worst_orth = 0.0, worst_det = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const GroupElement g = GroupElement::random(opt.n, rng);
    const IwasawaFactors f = iwasawa(g);
    worst_recon = std::max(worst_recon, (f.reconstruct() - g.mat()).norm() / g.mat().norm());
    worst_orth = std::max(
        worst_orth,
        (f.k_part.transpose() * f.k_part - Matrix::Identity(opt.n, opt.n)).norm());
    worst_det = std::max(worst_det, std::abs(f.a_part.determinant() - 1.0));
  }
  check.metrics["worst_reconstruction_rel"] = worst_recon;
  check.metrics["worst_k_orthogonality"] = worst_orth;
  check.metrics["worst_a_det_drift"] = worst_det;
  check.pass = worst_recon <= kReconstructionRel && worst_orth <= kOrthogonalityTol;
  return check;
}

CheckResult height_equivariance(const VerifyOptions& opt) {
  CheckResult check{"iwasawa.height_left_equivariance", true, {}};
  RandomStream rng(derive_seed(opt.seed, 102));
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const GroupElement g = GroupElement::random(opt.n, rng);
    const CartanVector log_a = random_cartan(opt.n, rng);
    const GroupElement ag(log_a.exp_diagonal() * g.mat());
    const Vector lhs = iwasawa_height(ag).coords();
    const Vector rhs = log_a.coords() + iwasawa_height(g).coords();
    worst = std::max(worst, (lhs - rhs).norm());
  }
  check.metrics["worst_residual"] = worst;
  check.pass = worst <= 1e-10;
  return check;
}

CheckResult wedge_oracle_agreement(const VerifyOptions& opt) {
  CheckResult check{"linalg.wedge_vs_normal_equations", true, {}};
  RandomStream rng(derive_seed(opt.seed, 103));
  double worst = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const int n = 3 + static_cast<int>(rng.below(3));  // ambient 3..5
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    std::vector<Vector> w;
    for (int i = 0; i < k; ++i) w.push_back(rng.gaussian_vector(n));
    const Vector v = rng.gaussian_vector(n);

    Matrix gram(k, k);
    Vector rhs(k);
    for (int i = 0; i < k; ++i) {
      rhs[i] = w[static_cast<size_t>(i)].dot(v);
      for (int j = 0; j < k; ++j) gram(i, j) = w[static_cast<size_t>(i)].dot(w[static_cast<size_t>(j)]);
    }
    const Vector coeff = gram.ldlt().solve(rhs);
    Vector proj = Vector::Zero(n);
    for (int i = 0; i < k; ++i) proj += coeff[i] * w[static_cast<size_t>(i)];

    const double norm_wedge = proj_norm_via_wedge(v, w);
    const double norm_direct = (v - proj).norm();
    worst = std::max(worst, std::abs(norm_wedge - norm_direct) / std::max(1.0, norm_direct));
    for (int i = 0; i < k; ++i) {
      const double c = proj_coeff_via_wedge(v, w, i);
      worst = std::max(worst, std::abs(c - coeff[i]) / std::max(1.0, std::abs(coeff[i])));
    }
  }
  check.metrics["worst_relative_error"] = worst;
  check.pass = worst <= 1e-10;
  return check;
}

CheckResult rep_compatibility(const VerifyOptions& opt) {
  CheckResult check{"representation.iwasawa_compatibility", true, {}};
  RandomStream rng(derive_seed(opt.seed, 104));
  const WeightedRep rep = (opt.rep == "adjoint") ? WeightedRep::adjoint_rep(opt.n)
                                                 : WeightedRep::std_rep(opt.n);
  const int d = rep.dim();
  double worst_k = 0.0, worst_a = 0.0, worst_n = 0.0;
  for (int s = 0; s < opt.samples; ++s) {
    const GroupElement g = GroupElement::random(opt.n, rng);
    const IwasawaFactors f = iwasawa(g);

    const Matrix img_k = rep.apply(GroupElement(f.k_part));
    worst_k = std::max(worst_k,
                       (img_k.transpose() * img_k - Matrix::Identity(d, d)).norm());

    const Matrix img_a = rep.apply(GroupElement(f.a_part));
    Matrix offdiag_a = img_a;
    offdiag_a.diagonal().setZero();
    worst_a = std::max(worst_a, offdiag_a.norm());

    const Matrix img_n = rep.apply(GroupElement(f.n_part));
    double below = 0.0;
    for (int i = 0; i < d; ++i) {
      below += std::abs(img_n(i, i) - 1.0);
      for (int j = 0; j < i; ++j) below += std::abs(img_n(i, j));
    }
    worst_n = std::max(worst_n, below);
  }
  check.metrics["worst_k_orthogonality"] = worst_k;
  check.metrics["worst_a_offdiagonal"] = worst_a;
  check.metrics["worst_n_shape"] = worst_n;
  check.pass = worst_k <= 1e-10 && worst_a <= 1e-10 && worst_n <= 1e-10;
  return check;
}

CheckResult partition_invariance(const VerifyOptions& opt) {
  CheckResult check{"partition.nam_left_invariance", true, {}};
  RandomStream rng(derive_seed(opt.seed, 105));
  const WeightedRep rep = (opt.rep == "adjoint") ? WeightedRep::adjoint_rep(opt.n)
                                                 : WeightedRep::std_rep(opt.n);
  int failures = 0;
  for (int s = 0; s < opt.samples; ++s) {
    const GroupElement g = GroupElement::random(opt.n, rng);
    if (!left_invariance_check(g, rep, derive_seed(opt.seed, 9000 + static_cast<std::uint64_t>(s))))
      ++failures;
  }
  check.metrics["failures"] = failures;
  check.pass = failures == 0;
  return check;
}

CheckResult partition_density(const VerifyOptions& opt) {
  CheckResult check{"partition.generic_density", true, {}};
  const WeightedRep rep = (opt.rep == "adjoint") ? WeightedRep::adjoint_rep(opt.n)
                                                 : WeightedRep::std_rep(opt.n);
  const double density = density_estimate(rep, opt.samples * 4, derive_seed(opt.seed, 106));
  check.metrics["density"] = density;
  check.pass = density == 1.0;
  return check;
}

CheckResult nbound_check(const VerifyOptions& opt) {
  CheckResult check{"partition.n_projection_bounded", true, {}};
  RandomStream rng(derive_seed(opt.seed, 107));
  const WeightedRep rep = WeightedRep::std_rep(opt.n);
  double worst_margin = 0.0;
  int unbounded = 0;
  const int runs = std::max(4, opt.samples / 8);
  for (int s = 0; s < runs; ++s) {
    const GroupElement g = GroupElement::random(opt.n, rng);
    std::vector<CartanVector> rays;
    for (int r = 0; r < 4; ++r) rays.push_back(random_regular_cartan(opt.n, rng));
    const NBoundReport report = n_bound_experiment(g, rep, rays, 15.0, 31);
    if (!report.bounded) ++unbounded;
    worst_margin = std::max(worst_margin, report.observed_sup - report.theoretical_bound);
  }
  check.metrics["unbounded_runs"] = unbounded;
  check.metrics["worst_margin"] = worst_margin;
  check.pass = unbounded == 0;
  return check;
}

CheckResult gradient_hessian_fd(const VerifyOptions& opt) {
  CheckResult check{"height.gradient_hessian_fd", true, {}};
  RandomStream rng(derive_seed(opt.seed, 108));
  const Matrix basis = cartan_orthonormal_basis(opt.n);
  double worst_grad = 0.0, worst_hess = 0.0;
  const int runs = std::max(8, opt.samples / 2);
  for (int s = 0; s < runs; ++s) {
    const HeightProblem p{random_cartan(opt.n, rng), GroupElement::random(opt.n, rng)};
    const Vector tau = rng.gaussian_vector(opt.n - 1);
    const CartanVector t(basis * tau);

    const Vector grad = basis.transpose() * grad_height(p, t).coords();
    const Matrix hess = hess_height(p, t);

    // Hessian columns from central differences of the analytic gradient;
    // differencing the height twice would amplify evaluation noise by
    // 1/step^2 beyond the tolerance under test.
    const double step = 1e-5;
    Vector grad_fd(opt.n - 1);
    Matrix hess_fd(opt.n - 1, opt.n - 1);
    for (int i = 0; i < opt.n - 1; ++i) {
      Vector e = Vector::Zero(opt.n - 1);
      e[i] = step;
      const double hp = height(p, CartanVector(basis * (tau + e)));
      const double hm = height(p, CartanVector(basis * (tau - e)));
      grad_fd[i] = (hp - hm) / (2 * step);
      const Vector gp =
          basis.transpose() * grad_height(p, CartanVector(basis * (tau + e))).coords();
      const Vector gm =
          basis.transpose() * grad_height(p, CartanVector(basis * (tau - e))).coords();
      hess_fd.col(i) = (gp - gm) / (2 * step);
    }
    const double gscale = std::max(grad.norm(), 1.0);
    const double hscale = std::max(hess.norm(), 1.0);
    worst_grad = std::max(worst_grad, (grad - grad_fd).norm() / gscale);
    worst_hess = std::max(worst_hess, (hess - hess_fd).norm() / hscale);
  }
  check.metrics["worst_gradient_rel"] = worst_grad;
  check.metrics["worst_hessian_rel"] = worst_hess;
  check.pass = worst_grad <= 1e-6 && worst_hess <= 1e-5;
  return check;
}

CheckResult c_point_check(const VerifyOptions& opt) {
  CheckResult check{"height.c_point_residual_rank", true, {}};
  RandomStream rng(derive_seed(opt.seed, 109));
  double worst_residual_rel = 0.0;
  int rank_failures = 0;
  const int runs = std::max(3, opt.samples / 16);
  for (int s = 0; s < runs; ++s) {
    const CartanVector h0 = random_generic_cartan(opt.n, rng);
    const CPoint c = find_C_point(h0, derive_seed(opt.seed, 500 + static_cast<std::uint64_t>(s)));
    worst_residual_rel =
        std::max(worst_residual_rel, c.residual / h0.coords().squaredNorm());
    if (c.jacobian_rank != opt.n - 1) ++rank_failures;
  }
  check.metrics["worst_residual_rel"] = worst_residual_rel;
  check.metrics["rank_failures"] = rank_failures;
  check.pass = worst_residual_rel <= 1e-12 && rank_failures == 0;
  return check;
}

CheckResult am_gm_sampling(const VerifyOptions& opt) {
  CheckResult check{"height.am_gm_inequality", true, {}};
  RandomStream rng(derive_seed(opt.seed, 110));
  int violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opt.samples * 20; ++s) {
    double a = rng.gaussian(), b = rng.gaussian();
    double c = -(a + b);
    const AmGmResult r = am_gm_check(a, b, c);
    if (!r.holds) ++violations;
    min_slack = std::min(min_slack, r.slack);
  }
  const AmGmResult equality = am_gm_check(1.0, 1.0, -2.0);
  check.metrics["violations"] = violations;
  check.metrics["min_slack"] = min_slack;
  check.metrics["equality_case_slack"] = std::abs(equality.slack);
  check.pass = violations == 0 && std::abs(equality.slack) <= 1e-10;
  return check;
}

CheckResult dim_identity(const VerifyOptions& opt) {
  CheckResult check{"height.dimension_identity", true, {}};
  int failures = 0;
  for (int n = 2; n <= 8; ++n) {
    const DimIdentityReport rep = dim_identity_check(n);
    if (!rep.difference_identity) ++failures;
    if (rep.equality_with_dim_a != (n == 2)) ++failures;
  }
  check.metrics["failures"] = failures;
  check.pass = failures == 0;
  (void)opt;
  return check;
}

CheckResult flow_invariants(const VerifyOptions& opt) {
  CheckResult check{"flow.isospectral_monotone_limit", true, {}};
  RandomStream rng(derive_seed(opt.seed, 111));
  double worst_drift = 0.0, worst_dual = 0.0, worst_violation = 0.0;
  int limit_failures = 0;
  const int runs = std::max(4, opt.samples / 10);
  for (int s = 0; s < runs; ++s) {
    const CartanVector h = random_regular_cartan(opt.n, rng, 0.3);
    const Matrix k = haar_orthogonal(opt.n, rng);
    FlowControls controls;
    controls.t_end = 80.0;
    const Trajectory traj = flow_from(k, h, controls);
    const FlowReport report = limit_analysis(traj, h);
    const MonotonicityAudit audit = monotonicity_audit(traj);
    worst_drift = std::max(worst_drift, traj.spectral_drift);
    worst_dual = std::max(worst_dual, traj.dual_route_residual);
    worst_violation = std::max(worst_violation, audit.worst_violation);
    if (!report.limit || !report.permutation) ++limit_failures;
  }
  check.metrics["worst_spectral_drift"] = worst_drift;
  check.metrics["worst_dual_route_residual"] = worst_dual;
  check.metrics["worst_c_alpha_violation"] = worst_violation;
  check.metrics["limit_failures"] = limit_failures;
  check.pass = worst_drift <= kSpectrumDriftTol && worst_dual <= kDualRouteTol &&
               worst_violation <= kCAlphaSlack && limit_failures == 0;
  return check;
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(iwasawa_reconstruction(opt));
  out.push_back(height_equivariance(opt));
  out.push_back(wedge_oracle_agreement(opt));
  out.push_back(rep_compatibility(opt));
  out.push_back(partition_invariance(opt));
  out.push_back(partition_density(opt));
  out.push_back(nbound_check(opt));
  out.push_back(gradient_hessian_fd(opt));
  out.push_back(c_point_check(opt));
  out.push_back(am_gm_sampling(opt));
  out.push_back(dim_identity(opt));
  out.push_back(flow_invariants(opt));
  return out;
}

}  // namespace maxflat
