#include "maxflat/representation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maxflat {

double weight_pairing(const Weight& w, const CartanVector& h) {
  double sum = 0.0;
  for (int i = 0; i < w.size(); ++i) sum += w[i] * h.coords()[i];
  return sum;
}

bool weight_lt(const Weight& mu, const Weight& lambda) {
  if (mu.size() != lambda.size()) throw InputError("weight_lt: dimension mismatch");
  const Weight diff = lambda - mu;
  int prefix = 0;
  int total = 0;
  bool nonzero = false;
  for (int i = 0; i < diff.size(); ++i) {
    prefix += diff[i];
    total += diff[i];
    if (diff[i] != 0) nonzero = true;
    if (i + 1 < diff.size() && prefix < 0) return false;
  }
  return nonzero && total == 0;
}

namespace {

// Fixed linear extension of root order used to sort rep bases.
struct WeightSortKey {
  long dominant;       // dot with (n-1, n-3, ..., -(n-1)); higher first
  std::vector<int> w;  // lexicographic tiebreak; higher first
  int index;           // construction order; lower first

  bool operator<(const WeightSortKey& o) const {
    if (dominant != o.dominant) return dominant > o.dominant;
    if (w != o.w) return w > o.w;
    return index < o.index;
  }
};

WeightSortKey make_key(const Weight& w, int index) {
  const int n = static_cast<int>(w.size());
  long dom = 0;
  for (int i = 0; i < n; ++i) dom += static_cast<long>(w[i]) * (n - 1 - 2 * i);
  return WeightSortKey{dom, std::vector<int>(w.data(), w.data() + n), index};
}

std::vector<Weight> distinct_in_order(const std::vector<Weight>& sorted) {
  std::vector<Weight> out;
  for (const auto& w : sorted) {
    if (out.empty() || out.back() != w) out.push_back(w);
  }
  return out;
}

}  // namespace

WeightedRep WeightedRep::std_rep(int n) {
  if (n < 2) throw InputError("std_rep: need n >= 2");
  WeightedRep rep;
  rep.kind_ = Kind::Std;
  rep.name_ = "std";
  rep.n_ = n;
  // Weight of e_i is eps_i; the dominant key already sorts them
  // eps_1 > eps_2 > ... > eps_n, so the standard basis order stands.
  for (int i = 0; i < n; ++i) {
    Weight w = Weight::Zero(n);
    w[i] = 1;
    rep.weights_.push_back(w);
  }
  rep.distinct_ = distinct_in_order(rep.weights_);
  return rep;
}

WeightedRep WeightedRep::adjoint_rep(int n) {
  if (n < 2) throw InputError("adjoint_rep: need n >= 2");

  struct Entry {
    Weight w;
    Matrix b;
  };
  std::vector<Entry> entries;

  // Off-diagonal units E_ij carry weight eps_i - eps_j and are already
  // orthonormal for the Frobenius form.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Weight w = Weight::Zero(n);
      w[i] = 1;
      w[j] = -1;
      Matrix b = Matrix::Zero(n, n);
      b(i, j) = 1.0;
      entries.push_back({w, std::move(b)});
    }
  }
  // Zero-weight block: Gram-Schmidt on (E_ii - E_{i+1,i+1}) in index order.
  const Matrix diag_basis = cartan_orthonormal_basis(n);
  for (int c = 0; c + 1 < n; ++c) {
    Weight w = Weight::Zero(n);
    entries.push_back({w, Matrix(diag_basis.col(c).asDiagonal())});
  }

  std::vector<int> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<WeightSortKey> keys;
  keys.reserve(entries.size());
  for (size_t i = 0; i < entries.size(); ++i)
    keys.push_back(make_key(entries[i].w, static_cast<int>(i)));
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[static_cast<size_t>(a)] < keys[static_cast<size_t>(b)]; });

  WeightedRep rep;
  rep.kind_ = Kind::Adjoint;
  rep.name_ = "adjoint";
  rep.n_ = n;
  for (int idx : order) {
    rep.weights_.push_back(entries[static_cast<size_t>(idx)].w);
    rep.basis_mats_.push_back(std::move(entries[static_cast<size_t>(idx)].b));
  }
  rep.distinct_ = distinct_in_order(rep.weights_);
  return rep;
}

Matrix WeightedRep::apply(const GroupElement& g) const {
  if (g.n() != n_) throw InputError("WeightedRep::apply: group size mismatch");
  return apply_matrix(g.mat());
}

Matrix WeightedRep::apply_matrix(const Matrix& m) const {
  if (m.rows() != n_ || m.cols() != n_)
    throw InputError("WeightedRep::apply: matrix size mismatch");
  if (kind_ == Kind::Std) return m;

  const int d = dim();
  const Matrix minv = m.inverse();
  Matrix out(d, d);
  for (int j = 0; j < d; ++j) {
    const Matrix image = m * basis_mats_[static_cast<size_t>(j)] * minv;
    for (int i = 0; i < d; ++i)
      out(i, j) = (basis_mats_[static_cast<size_t>(i)].array() * image.array()).sum();
  }
  return out;
}

BlockBelow block_below(const Weight& lambda, const WeightedRep& rep) {
  const auto& dw = rep.distinct_weights();
  if (std::find(dw.begin(), dw.end(), lambda) == dw.end())
    throw InputError("block_below: lambda is not a weight of the representation");

  BlockBelow bb;
  for (int i = 0; i < rep.dim(); ++i) {
    if (weight_lt(rep.weight(i), lambda)) bb.indices.push_back(i);
  }
  bb.s_lambda = static_cast<int>(bb.indices.size());
  return bb;
}

}  // namespace maxflat
