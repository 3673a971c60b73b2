#include "lpstab/zoo.hpp"

#include <algorithm>
#include <cmath>

#include "lpstab/errors.hpp"
#include "detail.hpp"

namespace lpstab {
namespace zoo {

IndexedMatrix dilation_matrix(int n, double lambda) {
  if (n < 1) throw ParameterError("dilation_matrix: n must be >= 1");
  if (!(lambda > 0.0)) throw ParameterError("dilation_matrix: lambda > 0");
  std::vector<Entry> e;
  for (int k = 0; k < n; ++k) {
    if (k == 0)  // (0,0) is the one overlap of the two blocks
      e.push_back({0, 0, 1.0 - lambda / 2.0});
    else
      e.push_back({2 * k, k, -lambda / 2.0});
    e.push_back({2 * k + 1, k, -lambda / 2.0});
    if (k > 0) e.push_back({k, k, 1.0});
  }
  auto space = std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
  return IndexedMatrix::from_entries(space, 2 * n, false, std::move(e));
}

std::vector<double> dilation_phi(int rows, int m) {
  if (m < 1 || m > rows) throw ParameterError("dilation_phi: bad m");
  std::vector<double> phi(rows, 0.0);
  for (int i = 0; i < m; ++i) phi[i] = 1.0 / m;
  return phi;
}

IndexedMatrix staircase_matrix(double p, int N) {
  if (!(p > 0.0) || std::isinf(p))
    throw ParameterError("staircase_matrix: p must be finite and > 0");
  if (N < 1) throw ParameterError("staircase_matrix: N must be >= 1");
  std::vector<Entry> e;
  int row = 0;
  for (int col = 1; col <= N; ++col) {
    double v = std::pow(col, -1.0 / p);
    for (int i = 0; i < col; ++i) e.push_back({row++, col - 1, v});
  }
  auto space = std::make_shared<const MetricSpace>(MetricSpace::z_interval(N));
  return IndexedMatrix::from_entries(space, row, false, std::move(e));
}

IndexedMatrix random_walk_operator(int n) {
  if (n < 2) throw ParameterError("random_walk_operator: n must be >= 2");
  std::vector<Entry> e;
  for (int x = 0; x < n; ++x) {
    e.push_back({x, x, 1.0});
    if (x > 0) e.push_back({x, x - 1, -0.5});
    if (x + 1 < n) e.push_back({x, x + 1, -0.5});
  }
  auto space = std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
  return IndexedMatrix::from_entries(space, n, true, std::move(e));
}

IndexedMatrix slanted_matrix(double alpha, double width, int n,
                             std::uint64_t seed) {
  if (alpha == 0.0) throw ParameterError("slanted_matrix: alpha must be != 0");
  if (width < 0.0) throw ParameterError("slanted_matrix: width must be >= 0");
  if (n < 1) throw ParameterError("slanted_matrix: n must be >= 1");
  detail::Rng rng(seed);
  std::vector<Entry> e;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (std::abs(y - alpha * x) <= width) {
        double v = rng.uniform(-1.0, 1.0);
        if (v != 0.0) e.push_back({y, x, v});
      }
  auto space = std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
  return IndexedMatrix::from_entries(space, n, true, std::move(e));
}

IndexedMatrix random_thin_sparse(SpacePtr space, double r, int v,
                                 double density, std::uint64_t seed,
                                 bool rows_banded) {
  if (!space) throw ParameterError("random_thin_sparse: null space");
  if (!(r >= 1.0) || v < 1)
    throw ParameterError("random_thin_sparse: need r >= 1 and v >= 1");
  if (!(density > 0.0 && density <= 1.0))
    throw ParameterError("random_thin_sparse: density must be in (0,1]");
  const int n = space->size();
  detail::Rng rng(seed);
  std::vector<int> col_budget(n, v);
  std::vector<Entry> e;
  for (int y = 0; y < n; ++y) {
    int center = rows_banded ? y : static_cast<int>(rng.uniform_int(n));
    auto ball = space->points_within(center, r);
    for (int x : ball) {
      if (col_budget[x] == 0) continue;
      if (rng.uniform01() > density) continue;
      double val = rng.uniform(-1.0, 1.0);
      if (val == 0.0) val = 0.5;
      e.push_back({y, x, val});
      --col_budget[x];
    }
  }
  if (e.empty())
    throw FeasibilityError("random_thin_sparse: column budgets left no room "
                           "to place any entry");
  return IndexedMatrix::from_entries(std::move(space), n, rows_banded,
                                     std::move(e));
}

IndexedMatrix polynomial_decay_matrix(SpacePtr space, double beta,
                                      std::uint64_t seed) {
  if (!space) throw ParameterError("polynomial_decay_matrix: null space");
  if (!(beta > 1.0))
    throw ParameterError("polynomial_decay_matrix: beta must be > 1");
  const int n = space->size();
  detail::Rng rng(seed);
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      e.push_back({y, x,
                   rng.sign() * std::pow(1.0 + space->distance(y, x), -beta)});
  return IndexedMatrix::from_entries(std::move(space), n, true, std::move(e));
}

IndexedMatrix exponential_decay_matrix(SpacePtr space, std::uint64_t seed) {
  if (!space) throw ParameterError("exponential_decay_matrix: null space");
  const int n = space->size();
  detail::Rng rng(seed);
  std::vector<Entry> e;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double v = std::exp(-space->distance(y, x));
      if (v != 0.0) e.push_back({y, x, rng.sign() * v});
    }
  return IndexedMatrix::from_entries(std::move(space), n, true, std::move(e));
}

}  // namespace zoo
}  // namespace lpstab
