#include <algorithm>
#include <cmath>
#include <map>

#include "lpstab/errors.hpp"
#include "lpstab/matrix.hpp"
#include "dense.hpp"
#include "detail.hpp"

namespace lpstab {

namespace {

constexpr int kMaxDenseDim = 3000;

double max_column_norm(const IndexedMatrix& a, Exponent p) {
  double best = 0.0;
  for (int x = 0; x < a.cols(); ++x) {
    double s = 0.0;
    for (std::int32_t i : a.column(x)) {
      double v = std::abs(a.entries()[i].value);
      if (p.is_inf())
        s = std::max(s, v);
      else
        s += std::pow(v, p.value());
    }
    if (!p.is_inf()) s = std::pow(s, p.inv());
    best = std::max(best, s);
  }
  return best;
}

double max_row_abs_sum(const IndexedMatrix& a) {
  double best = 0.0;
  for (int y = 0; y < a.rows(); ++y) {
    double s = 0.0;
    for (const Entry& e : a.row(y)) s += std::abs(e.value);
    best = std::max(best, s);
  }
  return best;
}

double max_col_abs_sum(const IndexedMatrix& a) {
  double best = 0.0;
  for (int x = 0; x < a.cols(); ++x) {
    double s = 0.0;
    for (std::int32_t i : a.column(x)) s += std::abs(a.entries()[i].value);
    best = std::max(best, s);
  }
  return best;
}

/// Largest singular value: dense decomposition at desk scale, power
/// iteration on A*A above it.
double sigma_max(const IndexedMatrix& a) {
  if (a.is_zero()) return 0.0;
  if (a.rows() <= kMaxDenseDim && a.cols() <= kMaxDenseDim) {
    Eigen::VectorXd sv = detail::singular_values(detail::to_dense(a));
    return sv.size() ? sv(0) : 0.0;
  }
  detail::Rng rng(0x51u);
  std::vector<double> f(a.cols());
  for (double& x : f) x = rng.uniform(-1.0, 1.0);
  double est = 0.0;
  for (int it = 0; it < 100000; ++it) {
    auto af = lpstab::apply(a, f);
    // f <- A^T (A f)
    std::vector<double> g(a.cols(), 0.0);
    for (const Entry& e : a.entries()) g[e.col] += e.value * af[e.row];
    double norm = lp_norm(g, Exponent(2.0));
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] /= norm;
    double next = std::sqrt(norm);
    bool done = std::abs(next - est) <= 1e-10 * std::max(1.0, next);
    est = next;
    f = std::move(g);
    if (done && it > 4) break;
  }
  return est;
}

}  // namespace

OpNormResult op_norm(const IndexedMatrix& a, Exponent p) {
  if (!p.valid()) throw ParameterError("op_norm: p must be positive");
  OpNormResult res;
  if (p.is_inf()) {
    res.value = max_row_abs_sum(a);
    res.kind = NormKind::exact;
    res.lower_bound = res.value;
    return res;
  }
  const double pv = p.value();
  if (pv <= 1.0) {
    // the max column quasi-norm, attained by the column witness
    res.value = max_column_norm(a, p);
    res.kind = NormKind::exact;
    res.lower_bound = res.value;
    return res;
  }
  if (pv == 2.0) {
    res.value = sigma_max(a);
    // exact (to numerical tolerance) at dense scale, a power-iteration
    // estimate from below beyond it
    res.kind = (a.rows() <= kMaxDenseDim && a.cols() <= kMaxDenseDim)
                   ? NormKind::exact
                   : NormKind::lower_bound;
    res.lower_bound = res.value;
    return res;
  }
  // interpolation upper bound, witness lower bound
  double n1 = max_col_abs_sum(a);
  double ninf = max_row_abs_sum(a);
  res.value = std::pow(n1, p.inv()) * std::pow(ninf, 1.0 - p.inv());
  res.kind = NormKind::upper_bound;
  double lower = max_column_norm(a, p);
  detail::Rng rng(0x10e5);
  for (int t = 0; t < 8; ++t) {
    std::vector<double> f(a.cols());
    for (double& x : f) x = rng.uniform(-1.0, 1.0);
    double fn = lp_norm(f, p);
    if (fn > 0.0) lower = std::max(lower, lp_norm(lpstab::apply(a, f), p) / fn);
  }
  res.lower_bound = std::min(lower, res.value);
  return res;
}

double schur_norm(const IndexedMatrix& a) {
  // accumulated in one pass, independently of op_norm's index walks
  std::vector<double> row_sum(a.rows(), 0.0), col_sum(a.cols(), 0.0);
  for (const Entry& e : a.entries()) {
    row_sum[e.row] += std::abs(e.value);
    col_sum[e.col] += std::abs(e.value);
  }
  double r = row_sum.empty() ? 0.0 : *std::max_element(row_sum.begin(),
                                                       row_sum.end());
  double c = col_sum.empty() ? 0.0 : *std::max_element(col_sum.begin(),
                                                       col_sum.end());
  return r + c;
}

double weighted_schur_norm(const IndexedMatrix& a, const Weight& w) {
  if (!a.rows_are_cols())
    throw StructureError("weighted_schur_norm requires Y = X");
  std::vector<double> row_sum(a.rows(), 0.0), col_sum(a.cols(), 0.0);
  for (const Entry& e : a.entries()) {
    double wv = w(a.col_space().distance(e.row, e.col)) * std::abs(e.value);
    row_sum[e.row] += wv;
    col_sum[e.col] += wv;
  }
  return *std::max_element(row_sum.begin(), row_sum.end()) +
         *std::max_element(col_sum.begin(), col_sum.end());
}

double cd_norm(const IndexedMatrix& a) {
  if (!a.rows_are_cols()) throw StructureError("cd_norm requires Y = X");
  if (!a.col_space().is_lattice())
    throw StructureError("cd_norm requires a lattice column space");
  std::map<std::vector<int>, double> envelope;
  for (const Entry& e : a.entries()) {
    auto k = a.col_space().lattice_offset(e.row, e.col);
    auto [it, fresh] = envelope.try_emplace(std::move(k), 0.0);
    it->second = std::max(it->second, std::abs(e.value));
  }
  double s = 0.0;
  for (const auto& [k, v] : envelope) s += v;
  return s;
}

SparseSparseBound sparse_sparse_bound(const IndexedMatrix& a) {
  SparseSparseBound res;
  res.v = std::max(a.stats().sparseness, a.stats().max_row_support);
  res.bound = res.v * a.stats().sup_norm;
  res.norm_1 = op_norm(a, Exponent(1.0)).value;
  res.norm_inf = op_norm(a, Exponent::inf()).value;
  res.norm_2 = op_norm(a, Exponent(2.0)).value;
  const double tol = 1e-9 * std::max(1.0, res.bound);
  res.verified = res.norm_1 <= res.bound + tol &&
                 res.norm_2 <= res.bound + tol &&
                 res.norm_inf <= res.bound + tol;
  return res;
}

}  // namespace lpstab
