#include <algorithm>
#include <cmath>

#include "lpstab/errors.hpp"
#include "lpstab/stability.hpp"

namespace lpstab {

double sequence_tail_bound(double p, Exponent q, int m) {
  if (!(p > 0.0)) throw ParameterError("sequence_tail_bound: p must be > 0");
  if (m < 1) throw ParameterError("sequence_tail_bound: m must be >= 1");
  if (q.is_inf()) {
    // monotonicity forces sup_{i>m} a_i = a_{m+1} <= (m+1)^{-1/p}
    return std::pow(m + 1.0, -1.0 / p);
  }
  const double qv = q.value();
  if (!(qv > p))
    throw ParameterError("sequence_tail_bound: need q > p");
  const double ratio = p / qv;
  return std::pow(ratio, 1.0 / qv) *
         std::pow(1.0 - ratio, 1.0 / p - 1.0 / qv) /
         std::pow(static_cast<double>(m), 1.0 / p - 1.0 / qv);
}

ThinningResult top_m_thinning(const IndexedMatrix& a, int m, double p,
                              Exponent q) {
  if (m < 1) throw ParameterError("top_m_thinning: m must be >= 1");
  if (!(p > 0.0)) throw ParameterError("top_m_thinning: p must be > 0");
  const double qfloor = std::max(p, 1.0);
  if (!(q.is_inf() || q.value() >= qfloor))
    throw ParameterError("top_m_thinning: need q >= max(p, 1)");

  // normalize so every column has lp mass at most 1; the factor is recorded
  double scale = 0.0;
  for (int x = 0; x < a.cols(); ++x) {
    double s = 0.0;
    for (std::int32_t i : a.column(x))
      s += std::pow(std::abs(a.entries()[i].value), p);
    scale = std::max(scale, std::pow(s, 1.0 / p));
  }
  if (scale == 0.0) scale = 1.0;

  std::vector<Entry> kept, dropped;
  std::vector<std::int32_t> order;
  for (int x = 0; x < a.cols(); ++x) {
    auto col = a.column(x);
    order.assign(col.begin(), col.end());
    std::sort(order.begin(), order.end(), [&](std::int32_t i, std::int32_t j) {
      double vi = std::abs(a.entries()[i].value);
      double vj = std::abs(a.entries()[j].value);
      if (vi != vj) return vi > vj;
      return a.entries()[i].row < a.entries()[j].row;
    });
    for (std::size_t k = 0; k < order.size(); ++k) {
      Entry e = a.entries()[order[k]];
      e.value /= scale;
      if (static_cast<int>(k) < m)
        kept.push_back(e);
      else
        dropped.push_back(e);
    }
  }

  ThinningResult res{
      IndexedMatrix::from_entries(a.col_space_ptr(), a.rows(),
                                  a.rows_are_cols(), std::move(kept)),
      scale, 0.0, 0.0, 0.0, 0.0, 0.0};

  double r = a.stats().thickness;
  double vr = 1.0;
  for (int x = 0; x < a.cols(); ++x)
    vr = std::max(vr, static_cast<double>(a.col_space().volume(x, r)));
  res.v_of_r = vr;
  res.bound = sequence_tail_bound(p, q, m) * std::pow(vr, 1.0 - q.inv());

  for (Entry& e : dropped) e.value = std::abs(e.value);
  IndexedMatrix tail = IndexedMatrix::from_entries(
      a.col_space_ptr(), a.rows(), a.rows_are_cols(), std::move(dropped));
  res.measured_1 = op_norm(tail, Exponent(1.0)).value;
  res.measured_2 = op_norm(tail, Exponent(2.0)).value;
  res.measured_inf = op_norm(tail, Exponent::inf()).value;
  return res;
}

}  // namespace lpstab
