#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpstab/exponent.hpp"
#include "lpstab/space.hpp"

namespace lpstab {

struct Entry {
  std::int32_t row = 0;
  std::int32_t col = 0;
  double value = 0.0;
};

/// Structural statistics of a matrix over Y x X.
///
/// thickness: smallest r such that every row support fits in some ball
/// B(x, r), x in X. sparseness: largest column support cardinality.
/// band_width: max d(row, col) over the support, only when Y = X.
struct StructuralStats {
  double thickness = 0.0;
  int sparseness = 0;
  std::optional<double> band_width;
  double sup_norm = 0.0;     // max |a_{y,x}|
  int max_row_support = 0;   // row sparseness, for sparse-sparse checks
};

/// Sparse real matrix indexed by (row set Y) x (metric space X). Entries are
/// kept sorted by (row, col) with no duplicates; instances are immutable and
/// safe for concurrent reads.
class IndexedMatrix {
public:
  /// rows_same_as_cols marks Y = X (same ids, same metric).
  static IndexedMatrix from_entries(SpacePtr col_space, int row_count,
                                    bool rows_same_as_cols,
                                    std::vector<Entry> entries);

  int rows() const { return row_count_; }
  int cols() const { return col_space_->size(); }
  bool rows_are_cols() const { return rows_same_as_cols_; }
  const MetricSpace& col_space() const { return *col_space_; }
  SpacePtr col_space_ptr() const { return col_space_; }

  const std::vector<Entry>& entries() const { return entries_; }
  std::span<const Entry> row(int y) const;
  /// Indices into entries() of column x, ordered by row.
  std::span<const std::int32_t> column(int x) const;

  const StructuralStats& stats() const { return stats_; }

  bool is_zero() const { return entries_.empty(); }

private:
  IndexedMatrix() = default;
  void build_index();
  void compute_stats();

  SpacePtr col_space_;
  int row_count_ = 0;
  bool rows_same_as_cols_ = false;
  std::vector<Entry> entries_;
  std::vector<std::int32_t> row_ptr_;
  std::vector<std::int32_t> col_ptr_;
  std::vector<std::int32_t> col_order_;
  StructuralStats stats_;
};

std::vector<double> apply(const IndexedMatrix& a, std::span<const double> f);
IndexedMatrix adjoint(const IndexedMatrix& a);
IndexedMatrix abs(const IndexedMatrix& a);
IndexedMatrix compose(const IndexedMatrix& a, const IndexedMatrix& b);
/// A*A, indexed by X on both sides.
IndexedMatrix gram(const IndexedMatrix& a);

/// Recomputes the stored structural statistics from scratch.
StructuralStats structural_stats(const IndexedMatrix& a);

/// Weight families omega(x, y) >= 1 on X x X.
struct Weight {
  enum class Family { Polynomial, Subexponential };
  Family family = Family::Polynomial;
  double alpha = 0.0;   // polynomial: 1 + d^alpha
  double C = 1.0;       // subexponential: exp(C * d^delta)
  double delta = 0.5;

  static Weight polynomial(double alpha);
  static Weight subexponential(double C, double delta);
  double operator()(double dist) const;
  std::string str() const;
};

enum class NormKind { exact, upper_bound, lower_bound };

struct OpNormResult {
  double value = 0.0;
  NormKind kind = NormKind::exact;
  /// Best witness-based lower bound (equals value when exact).
  double lower_bound = 0.0;
};

/// Operator lp -> lp norm. Exact for p in {1, 2, inf}; for other p >= 1 the
/// Riesz-Thorin interpolation upper bound together with a witness lower
/// bound; for p < 1 the max column quasi-norm, which the column witness
/// attains.
OpNormResult op_norm(const IndexedMatrix& a, Exponent p);

/// ||A||_{1->1} + ||A||_{inf->inf} computed from its defining row/column
/// sums (independent of op_norm).
double schur_norm(const IndexedMatrix& a);
double weighted_schur_norm(const IndexedMatrix& a, const Weight& w);
/// sum over lattice offsets k of sup_{y-x=k} |a_{y,x}|; requires a lattice
/// column space with Y = X.
double cd_norm(const IndexedMatrix& a);

struct DisjointSupportCheck {
  bool precondition_met = false;  // supports of u, v are 2r-disjoint
  double support_gap = 0.0;       // min distance between the two supports
  bool outputs_disjoint = false;  // supp(Au) and supp(Av) disjoint
  /// True when the statement it tests is not contradicted: outputs must be
  /// disjoint whenever the precondition holds.
  bool holds = false;
};
DisjointSupportCheck check_disjoint_supports(const IndexedMatrix& a,
                                             std::span<const double> u,
                                             std::span<const double> v);

struct GramBandCheck {
  bool holds = false;
  double propagation = 0.0;  // measured band width of A*A
  double limit = 0.0;        // 2 * thickness(A)
};
GramBandCheck check_gram_banded(const IndexedMatrix& a);

struct SparseSparseBound {
  double bound = 0.0;  // v * ||A||_sup
  int v = 0;           // max of row/column sparseness
  bool verified = false;
  double norm_1 = 0.0;
  double norm_2 = 0.0;
  double norm_inf = 0.0;
};
/// Verifies ||A||_{p->p} <= v * ||A||_sup for p in {1, 2, inf}.
SparseSparseBound sparse_sparse_bound(const IndexedMatrix& a);

}  // namespace lpstab
