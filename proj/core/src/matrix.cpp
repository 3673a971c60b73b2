#include "lpstab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lpstab/errors.hpp"

namespace lpstab {

IndexedMatrix IndexedMatrix::from_entries(SpacePtr col_space, int row_count,
                                          bool rows_same_as_cols,
                                          std::vector<Entry> entries) {
  if (!col_space) throw ParameterError("matrix: null column space");
  if (row_count < 0) throw ShapeError("matrix: negative row count");
  if (rows_same_as_cols && row_count != col_space->size())
    throw ShapeError("matrix: rows marked same as columns but counts differ");
  IndexedMatrix a;
  a.col_space_ = std::move(col_space);
  a.row_count_ = row_count;
  a.rows_same_as_cols_ = rows_same_as_cols;

  const int n = a.col_space_->size();
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= row_count || e.col < 0 || e.col >= n)
      throw ShapeError("matrix: entry index out of range");
    if (!std::isfinite(e.value))
      throw FormatError("matrix: entry value not finite");
  }
  // exact zeros carry no support; anything else is kept
  std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].row == entries[i - 1].row &&
        entries[i].col == entries[i - 1].col)
      throw FormatError("matrix: duplicate entry at (" +
                        std::to_string(entries[i].row) + "," +
                        std::to_string(entries[i].col) + ")");
  a.entries_ = std::move(entries);
  a.build_index();
  a.compute_stats();
  return a;
}

void IndexedMatrix::build_index() {
  const int m = row_count_, n = col_space_->size();
  row_ptr_.assign(m + 1, 0);
  for (const Entry& e : entries_) ++row_ptr_[e.row + 1];
  for (int y = 0; y < m; ++y) row_ptr_[y + 1] += row_ptr_[y];

  col_ptr_.assign(n + 1, 0);
  for (const Entry& e : entries_) ++col_ptr_[e.col + 1];
  for (int x = 0; x < n; ++x) col_ptr_[x + 1] += col_ptr_[x];
  col_order_.resize(entries_.size());
  std::vector<std::int32_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(entries_.size()); ++i)
    col_order_[cursor[entries_[i].col]++] = i;
}

void IndexedMatrix::compute_stats() {
  StructuralStats s;
  for (const Entry& e : entries_)
    s.sup_norm = std::max(s.sup_norm, std::abs(e.value));
  for (int x = 0; x < col_space_->size(); ++x)
    s.sparseness = std::max(s.sparseness,
                            static_cast<int>(col_ptr_[x + 1] - col_ptr_[x]));
  std::vector<int> support;
  for (int y = 0; y < row_count_; ++y) {
    auto r = row(y);
    s.max_row_support = std::max(s.max_row_support, static_cast<int>(r.size()));
    if (r.empty()) continue;
    support.clear();
    for (const Entry& e : r) support.push_back(e.col);
    s.thickness = std::max(s.thickness,
                           col_space_->enclosing_ball(support).radius);
  }
  if (rows_same_as_cols_) {
    double bw = 0.0;
    for (const Entry& e : entries_)
      bw = std::max(bw, col_space_->distance(e.row, e.col));
    s.band_width = bw;
  }
  stats_ = s;
}

std::span<const Entry> IndexedMatrix::row(int y) const {
  return {entries_.data() + row_ptr_[y],
          static_cast<std::size_t>(row_ptr_[y + 1] - row_ptr_[y])};
}

std::span<const std::int32_t> IndexedMatrix::column(int x) const {
  return {col_order_.data() + col_ptr_[x],
          static_cast<std::size_t>(col_ptr_[x + 1] - col_ptr_[x])};
}

StructuralStats structural_stats(const IndexedMatrix& a) {
  IndexedMatrix copy = IndexedMatrix::from_entries(
      a.col_space_ptr(), a.rows(), a.rows_are_cols(), a.entries());
  return copy.stats();
}

std::vector<double> apply(const IndexedMatrix& a, std::span<const double> f) {
  if (static_cast<int>(f.size()) != a.cols())
    throw ShapeError("apply: vector length does not match column count");
  std::vector<double> out(a.rows(), 0.0);
  for (const Entry& e : a.entries()) out[e.row] += e.value * f[e.col];
  return out;
}

IndexedMatrix adjoint(const IndexedMatrix& a) {
  std::vector<Entry> t;
  t.reserve(a.entries().size());
  for (const Entry& e : a.entries()) t.push_back({e.col, e.row, e.value});
  if (a.rows_are_cols())
    return IndexedMatrix::from_entries(a.col_space_ptr(), a.cols(), true,
                                       std::move(t));
  // abstract row set: the adjoint's columns carry the 0/1 metric
  auto rows_as_space =
      std::make_shared<const MetricSpace>(MetricSpace::discrete(a.rows()));
  return IndexedMatrix::from_entries(rows_as_space, a.cols(), false,
                                     std::move(t));
}

IndexedMatrix abs(const IndexedMatrix& a) {
  std::vector<Entry> t = a.entries();
  for (Entry& e : t) e.value = std::abs(e.value);
  return IndexedMatrix::from_entries(a.col_space_ptr(), a.rows(),
                                     a.rows_are_cols(), std::move(t));
}

IndexedMatrix compose(const IndexedMatrix& a, const IndexedMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("compose: inner index sets do not match");
  // CSR x CSR with a dense accumulator per row
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<std::int32_t> touched;
  std::vector<Entry> out;
  for (int y = 0; y < a.rows(); ++y) {
    touched.clear();
    for (const Entry& ea : a.row(y)) {
      for (const Entry& eb : b.row(ea.col)) {
        if (acc[eb.col] == 0.0 && eb.value != 0.0) touched.push_back(eb.col);
        acc[eb.col] += ea.value * eb.value;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::int32_t x : touched) {
      if (acc[x] != 0.0) out.push_back({y, x, acc[x]});
      acc[x] = 0.0;
    }
  }
  bool same = a.rows_are_cols() && b.rows_are_cols();
  return IndexedMatrix::from_entries(b.col_space_ptr(), a.rows(), same,
                                     std::move(out));
}

IndexedMatrix gram(const IndexedMatrix& a) {
  IndexedMatrix g = compose(adjoint(a), a);
  return IndexedMatrix::from_entries(a.col_space_ptr(), a.cols(), true,
                                     g.entries());
}

Weight Weight::polynomial(double alpha) {
  if (alpha < 0.0) throw ParameterError("weight: alpha must be >= 0");
  Weight w;
  w.family = Family::Polynomial;
  w.alpha = alpha;
  return w;
}

Weight Weight::subexponential(double C, double delta) {
  if (!(C > 0.0)) throw ParameterError("weight: C must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("weight: delta must be in (0,1)");
  Weight w;
  w.family = Family::Subexponential;
  w.C = C;
  w.delta = delta;
  return w;
}

double Weight::operator()(double dist) const {
  if (family == Family::Polynomial) return 1.0 + std::pow(dist, alpha);
  return std::exp(C * std::pow(dist, delta));
}

std::string Weight::str() const {
  char buf[80];
  if (family == Family::Polynomial)
    std::snprintf(buf, sizeof(buf), "poly:%g", alpha);
  else
    std::snprintf(buf, sizeof(buf), "subexp:%g,%g", C, delta);
  return buf;
}

DisjointSupportCheck check_disjoint_supports(const IndexedMatrix& a,
                                             std::span<const double> u,
                                             std::span<const double> v) {
  if (static_cast<int>(u.size()) != a.cols() ||
      static_cast<int>(v.size()) != a.cols())
    throw ShapeError("check_disjoint_supports: vector length mismatch");
  std::vector<int> su, sv;
  for (int i = 0; i < a.cols(); ++i) {
    if (u[i] != 0.0) su.push_back(i);
    if (v[i] != 0.0) sv.push_back(i);
  }
  DisjointSupportCheck res;
  double gap = std::numeric_limits<double>::infinity();
  for (int x : su)
    for (int y : sv) gap = std::min(gap, a.col_space().distance(x, y));
  res.support_gap = gap;
  res.precondition_met = gap > 2.0 * a.stats().thickness;

  auto au = lpstab::apply(a, u);
  auto av = lpstab::apply(a, v);
  res.outputs_disjoint = true;
  for (int y = 0; y < a.rows(); ++y)
    if (au[y] != 0.0 && av[y] != 0.0) {
      res.outputs_disjoint = false;
      break;
    }
  res.holds = res.outputs_disjoint || !res.precondition_met;
  return res;
}

GramBandCheck check_gram_banded(const IndexedMatrix& a) {
  IndexedMatrix g = gram(a);
  GramBandCheck res;
  res.limit = 2.0 * a.stats().thickness;
  res.propagation = g.stats().band_width.value_or(0.0);
  res.holds = res.propagation <= res.limit + 1e-12;
  return res;
}

}  // namespace lpstab
