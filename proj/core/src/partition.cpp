#include "maxflat/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace maxflat {

namespace {

// Canonical order on weights for support sets: descending dominant pairing,
// descending lexicographic tiebreak. Matches the rep basis sort.
bool weight_canonical_less(const Weight& a, const Weight& b) {
  const int n = static_cast<int>(a.size());
  long da = 0, db = 0;
  for (int i = 0; i < n; ++i) {
    da += static_cast<long>(a[i]) * (n - 1 - 2 * i);
    db += static_cast<long>(b[i]) * (n - 1 - 2 * i);
  }
  if (da != db) return da > db;
  for (int i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

std::string weight_to_string(const Weight& w) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < w.size(); ++i) {
    if (i) os << ",";
    os << w[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

bool OmegaSignature::operator==(const OmegaSignature& other) const {
  if (entries.size() != other.entries.size()) return false;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].lambda != other.entries[i].lambda) return false;
    if (entries[i].support.size() != other.entries[i].support.size()) return false;
    for (size_t j = 0; j < entries[i].support.size(); ++j)
      if (entries[i].support[j] != other.entries[i].support[j]) return false;
  }
  return true;
}

std::string OmegaSignature::to_string() const {
  std::ostringstream os;
  for (const auto& entry : entries) {
    os << weight_to_string(entry.lambda) << ":{";
    for (size_t j = 0; j < entry.support.size(); ++j) {
      if (j) os << " ";
      os << weight_to_string(entry.support[j]);
    }
    os << "} ";
  }
  return os.str();
}

PartitionContext make_partition_context(const WeightedRep& rep) {
  PartitionContext ctx;
  ctx.rep_dim = rep.dim();
  for (const auto& lambda : rep.distinct_weights()) {
    PartitionContext::Block block;
    block.lambda = lambda;
    const BlockBelow bb = block_below(lambda, rep);
    block.indices = bb.indices;
    for (int i = 0; i < rep.dim(); ++i)
      if (rep.weight(i) == lambda) block.rows_at_lambda.push_back(i);

    if (bb.s_lambda > 0) {
      const auto subsets = k_subsets(rep.dim(), bb.s_lambda);
      block.subset_weights.reserve(subsets.size());
      std::map<std::vector<int>, int> group_of;
      for (const auto& subset : subsets) {
        Weight sum = Weight::Zero(rep.group_n());
        for (int member : subset) sum += rep.weight(member);
        block.subset_weights.push_back(sum);
        std::vector<int> key(sum.data(), sum.data() + sum.size());
        auto [it, inserted] = group_of.try_emplace(
            key, static_cast<int>(block.distinct_subset_weights.size()));
        if (inserted) {
          block.distinct_subset_weights.push_back(sum);
          block.groups.emplace_back();
        }
        block.groups[static_cast<size_t>(it->second)].push_back(
            static_cast<int>(block.subset_weights.size()) - 1);
      }
    }
    ctx.blocks.push_back(std::move(block));
  }
  return ctx;
}

OmegaSignature classify_with_context(const GroupElement& g, const WeightedRep& rep,
                                     const PartitionContext& ctx, double support_rel) {
  return classify_matrix(g.mat(), rep, ctx, support_rel);
}

OmegaSignature classify_matrix(const Matrix& m, const WeightedRep& rep,
                               const PartitionContext& ctx, double support_rel) {
  const Matrix image = rep.apply_matrix(m);
  OmegaSignature sig;
  for (const auto& block : ctx.blocks) {
    OmegaSignature::Entry entry;
    entry.lambda = block.lambda;
    if (!block.indices.empty()) {
      Matrix rows(static_cast<Eigen::Index>(block.indices.size()), image.cols());
      for (size_t r = 0; r < block.indices.size(); ++r)
        rows.row(static_cast<Eigen::Index>(r)) = image.row(block.indices[r]);
      const WedgeVector line = wedge_rows(rows);
      const double total = line.norm();
      if (total <= kAbsFloor)
        throw NumericalError("classify: degenerate trailing wedge for invertible input");
      for (size_t grp = 0; grp < block.groups.size(); ++grp) {
        double norm2 = 0.0;
        for (int subset_index : block.groups[grp]) {
          const double c = line.coords[subset_index];
          norm2 += c * c;
        }
        if (std::sqrt(norm2) > support_rel * total)
          entry.support.push_back(block.distinct_subset_weights[grp]);
      }
      std::sort(entry.support.begin(), entry.support.end(), weight_canonical_less);
    }
    sig.entries.push_back(std::move(entry));
  }
  return sig;
}

OmegaSignature classify(const GroupElement& g, const WeightedRep& rep, double support_rel) {
  return classify_with_context(g, rep, make_partition_context(rep), support_rel);
}

OmegaSignature generic_signature(const WeightedRep& rep, int sample_count,
                                 std::uint64_t seed, double support_rel) {
  if (sample_count < 1) throw InputError("generic_signature: need sample_count >= 1");
  const PartitionContext ctx = make_partition_context(rep);
  RandomStream rng(seed);

  OmegaSignature acc;
  for (int s = 0; s < sample_count; ++s) {
    const GroupElement g = GroupElement::random(rep.group_n(), rng);
    OmegaSignature sig = classify_with_context(g, rep, ctx, support_rel);
    if (s == 0) {
      acc = std::move(sig);
      continue;
    }
    for (size_t e = 0; e < acc.entries.size(); ++e) {
      auto& dst = acc.entries[e].support;
      for (const auto& w : sig.entries[e].support) {
        if (std::find(dst.begin(), dst.end(), w) == dst.end()) dst.push_back(w);
      }
    }
  }
  for (auto& entry : acc.entries)
    std::sort(entry.support.begin(), entry.support.end(), weight_canonical_less);
  return acc;
}

Matrix random_unipotent(int n, RandomStream& rng) {
  Matrix u = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) u(i, j) = rng.gaussian();
  return u;
}

Matrix random_sign_diagonal(int n, RandomStream& rng) {
  Vector d(n);
  int negatives = 0;
  for (int i = 0; i < n; ++i) {
    d[i] = (rng.uniform01() < 0.5) ? -1.0 : 1.0;
    if (d[i] < 0) ++negatives;
  }
  if (negatives % 2 == 1) d[n - 1] = -d[n - 1];
  return d.asDiagonal();
}

bool left_invariance_check(const GroupElement& g, const WeightedRep& rep,
                           std::uint64_t seed, double a_scale, double support_rel) {
  RandomStream rng(seed);
  const int n = g.n();
  const PartitionContext ctx = make_partition_context(rep);

  const Matrix u = random_unipotent(n, rng);
  Vector log_a = rng.gaussian_vector(n);
  log_a.array() -= log_a.mean();
  // a_scale is the target max |log a_i|, so stress runs hit e^{+-scale}.
  const double peak = log_a.cwiseAbs().maxCoeff();
  if (peak > kAbsFloor) log_a *= a_scale / peak;
  if (a_scale > 2.0) {
    // Extreme diagonals must be chamber-ordered for the product u a m g to
    // be representable: with increasing scales, the unipotent mixing buries
    // the leading-row directions below double precision and the stored
    // matrix no longer lies in the class of the exact product.
    std::sort(log_a.data(), log_a.data() + n, std::greater<double>());
  }
  const Matrix a = log_a.array().exp().matrix().asDiagonal();
  const Matrix m = random_sign_diagonal(n, rng);

  const Matrix moved = u * a * m * g.mat();
  return classify_matrix(moved, rep, ctx, support_rel) ==
         classify_matrix(g.mat(), rep, ctx, support_rel);
}

namespace {

// Per-entry weight buckets: the (i, j) coefficient of the unipotent factor
// of rho(g) D, for D = exp(t drho(H)) diagonal, equals
//   sum_mu e^{2t<mu,H>} <c_mu, d_mu> / sum_mu e^{2t<mu,H>} ||d_mu||^2,
// where d is the trailing wedge of rows j..d-1, c the wedge with row i in
// front of rows j+1..d-1, and mu runs over exterior weights. Evaluating the
// buckets with a shifted exponent is stable for any t, unlike the raw
// Gram-Schmidt whose dynamic range overflows double precision.
struct EntryBuckets {
  std::vector<Vector> mu_dot_free;  // the weight mu as a double vector
  std::vector<double> cd;
  std::vector<double> dd;
  double triangle_bound = 0.0;  // max over dd > 0 of |cd| / dd
};

std::vector<std::vector<EntryBuckets>> build_entry_buckets(const Matrix& image,
                                                           const WeightedRep& rep) {
  const int d = static_cast<int>(image.rows());
  std::vector<std::vector<EntryBuckets>> entries(
      static_cast<size_t>(d), std::vector<EntryBuckets>(static_cast<size_t>(d)));

  for (int j = 1; j < d; ++j) {
    const int degree = d - j;
    Matrix tail(degree, d);
    for (int r = 0; r < degree; ++r) tail.row(r) = image.row(j + r);
    const WedgeVector denom = wedge_rows(tail);

    // Group exterior coordinates by total weight; equal-weight coordinates
    // scale identically under every diagonal ray.
    const auto subsets = k_subsets(d, degree);
    std::map<std::vector<int>, std::vector<int>> groups;
    std::map<std::vector<int>, Vector> group_weight;
    for (size_t s = 0; s < subsets.size(); ++s) {
      Weight sum = Weight::Zero(rep.group_n());
      for (int member : subsets[s]) sum += rep.weight(member);
      std::vector<int> key(sum.data(), sum.data() + sum.size());
      groups[key].push_back(static_cast<int>(s));
      group_weight.try_emplace(key, sum.cast<double>());
    }

    Matrix head(degree, d);
    for (int r = 1; r < degree; ++r) head.row(r) = image.row(j + r);
    for (int i = 0; i < j; ++i) {
      head.row(0) = image.row(i);
      const WedgeVector numer = wedge_rows(head);
      EntryBuckets& entry = entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
      for (const auto& [key, members] : groups) {
        double cd = 0.0, dd = 0.0;
        for (int s : members) {
          cd += numer.coords[s] * denom.coords[s];
          dd += denom.coords[s] * denom.coords[s];
        }
        if (dd <= kAbsFloor && std::abs(cd) <= kAbsFloor) continue;
        entry.mu_dot_free.push_back(group_weight.at(key));
        entry.cd.push_back(cd);
        entry.dd.push_back(dd);
        if (dd > kAbsFloor)
          entry.triangle_bound = std::max(entry.triangle_bound, std::abs(cd) / dd);
      }
    }
  }
  return entries;
}

double evaluate_entry(const EntryBuckets& entry, double t, const Vector& h) {
  double max_exponent = -std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < entry.dd.size(); ++b) {
    if (entry.dd[b] <= kAbsFloor) continue;
    max_exponent = std::max(max_exponent, 2.0 * t * entry.mu_dot_free[b].dot(h));
  }
  if (!std::isfinite(max_exponent))
    throw NumericalError("n-part entry: no nonzero denominator bucket");
  double num = 0.0, den = 0.0;
  for (size_t b = 0; b < entry.dd.size(); ++b) {
    const double weight = std::exp(2.0 * t * entry.mu_dot_free[b].dot(h) - max_exponent);
    num += weight * entry.cd[b];
    den += weight * entry.dd[b];
  }
  return num / den;
}

}  // namespace

Matrix n_entry_bounds(const GroupElement& g, const WeightedRep& rep) {
  const Matrix image = rep.apply(g);
  const int d = static_cast<int>(image.rows());
  const auto entries = build_entry_buckets(image, rep);
  Matrix bounds = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      bounds(i, j) = entries[static_cast<size_t>(i)][static_cast<size_t>(j)].triangle_bound;
  return bounds;
}

/// Entries of the unipotent Iwasawa factor of rho(g) exp(t drho(H)),
/// evaluated through the exterior-power form of the Gram-Schmidt
/// coefficients.
Matrix n_part_along_ray(const GroupElement& g, const WeightedRep& rep,
                        const CartanVector& ray, double t) {
  const Matrix image = rep.apply(g);
  const int d = static_cast<int>(image.rows());
  const auto entries = build_entry_buckets(image, rep);
  Matrix n_part = Matrix::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      n_part(i, j) = evaluate_entry(entries[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                    t, ray.coords());
  return n_part;
}

NBoundReport n_bound_experiment(const GroupElement& g, const WeightedRep& rep,
                                const std::vector<CartanVector>& rays, double t_max,
                                int grid_points) {
  if (grid_points < 2) throw InputError("n_bound_experiment: need at least 2 grid points");
  if (rays.empty()) throw InputError("n_bound_experiment: need at least one ray");

  const Matrix image = rep.apply(g);
  const int d = static_cast<int>(image.rows());

  NBoundReport report;
  {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the entry bytes
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) {
        const double v = g.mat()(i, j);
        const auto* bytes = reinterpret_cast<const unsigned char*>(&v);
        for (size_t b = 0; b < sizeof(double); ++b) {
          h ^= bytes[b];
          h *= 0x100000001b3ULL;
        }
      }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    report.g_id = buf;
  }
  report.rep_dim = d;
  report.t_max = t_max;
  report.grid_points = grid_points;
  report.rays = rays;

  const Matrix bounds = n_entry_bounds(g, rep);
  report.theoretical_bound = bounds.norm();

  if (g.n() == 2 && rep.kind() == WeightedRep::Kind::Std) {
    const Matrix& m = g.mat();
    double analytic = 0.0;
    if (std::abs(m(1, 0)) > kAbsFloor) analytic = std::abs(m(0, 0) / m(1, 0));
    if (std::abs(m(1, 1)) > kAbsFloor)
      analytic = std::max(analytic, std::abs(m(0, 1) / m(1, 1)));
    report.sl2_analytic_bound = analytic;
  }

  const auto entries = build_entry_buckets(image, rep);
  double sup = 0.0;
  for (const auto& ray : rays) {
    if (ray.n() != g.n()) throw InputError("n_bound_experiment: ray dimension mismatch");
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(grid_points));
    for (int p = 0; p < grid_points; ++p) {
      const double t = -t_max + 2.0 * t_max * p / (grid_points - 1);
      double off2 = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          const double entry =
              evaluate_entry(entries[static_cast<size_t>(i)][static_cast<size_t>(j)], t,
                             ray.coords());
          off2 += entry * entry;
        }
      }
      const double off = std::sqrt(off2);
      grid.push_back(off);
      sup = std::max(sup, off);
    }
    report.grid_off_identity.push_back(std::move(grid));
  }
  report.observed_sup = sup;
  report.bounded = std::isfinite(sup) &&
                   sup <= report.theoretical_bound * (1.0 + 1e-9) + 1e-9;
  return report;
}

double density_estimate(const WeightedRep& rep, int samples, std::uint64_t seed,
                        double support_rel) {
  if (samples < 1) throw InputError("density_estimate: need samples >= 1");
  const PartitionContext ctx = make_partition_context(rep);
  const OmegaSignature generic = generic_signature(rep, 64, seed ^ 0xabcdef12345ULL, support_rel);

  RandomStream rng(seed);
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    const GroupElement g = GroupElement::random(rep.group_n(), rng);
    if (classify_with_context(g, rep, ctx, support_rel) == generic) ++hits;
  }
  return static_cast<double>(hits) / samples;
}

RepIndependenceReport rep_independence_experiment(int n, int samples, std::uint64_t seed) {
  if (n != 2 && n != 3) throw InputError("rep_independence_experiment: n must be 2 or 3");
  const WeightedRep std_rep = WeightedRep::std_rep(n);
  const WeightedRep adj_rep = WeightedRep::adjoint_rep(n);
  const PartitionContext std_ctx = make_partition_context(std_rep);
  const PartitionContext adj_ctx = make_partition_context(adj_rep);

  RandomStream rng(seed);
  const auto weyl = weyl_group(n);

  // Mixed pool: generic elements plus structured exceptional ones of the
  // form u a m w, which populate the lower-dimensional classes.
  std::vector<GroupElement> pool;
  for (int s = 0; s < samples; ++s) {
    if (s % 2 == 0) {
      pool.push_back(GroupElement::random(n, rng));
    } else {
      const Matrix u = random_unipotent(n, rng);
      Vector log_a = rng.gaussian_vector(n);
      log_a.array() -= log_a.mean();
      const Matrix a = log_a.array().exp().matrix().asDiagonal();
      const Matrix m = random_sign_diagonal(n, rng);
      const auto& w = weyl[static_cast<size_t>(rng.below(weyl.size()))];
      pool.push_back(GroupElement(u * a * m * w.orthogonal_representative()));
    }
  }

  std::vector<OmegaSignature> sig_std, sig_adj;
  sig_std.reserve(pool.size());
  sig_adj.reserve(pool.size());
  for (const auto& g : pool) {
    sig_std.push_back(classify_with_context(g, std_rep, std_ctx));
    sig_adj.push_back(classify_with_context(g, adj_rep, adj_ctx));
  }

  RepIndependenceReport report;
  report.sample_count = static_cast<int>(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    for (size_t j = i + 1; j < pool.size(); ++j) {
      const bool same_std = sig_std[i] == sig_std[j];
      const bool same_adj = sig_adj[i] == sig_adj[j];
      if (same_std && same_adj) ++report.both_same;
      else if (!same_std && !same_adj) ++report.both_different;
      else if (same_std) ++report.std_same_adjoint_different;
      else ++report.std_different_adjoint_same;
    }
  }
  return report;
}

}  // namespace maxflat
