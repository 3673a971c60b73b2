#include <doctest.h>

#include <cmath>
#include <random>

#include "lpstab/errors.hpp"
#include "lpstab/matrix.hpp"
#include "lpstab/zoo.hpp"

using namespace lpstab;

namespace {

SpacePtr z(int n) {
  return std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
}

IndexedMatrix from_dense(const std::vector<std::vector<double>>& rows,
                         bool square = false) {
  int m = static_cast<int>(rows.size());
  int n = static_cast<int>(rows[0].size());
  std::vector<Entry> e;
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < n; ++x)
      if (rows[y][x] != 0.0) e.push_back({y, x, rows[y][x]});
  return IndexedMatrix::from_entries(z(n), m, square, std::move(e));
}

IndexedMatrix identity(int n) {
  std::vector<Entry> e;
  for (int i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return IndexedMatrix::from_entries(z(n), n, true, std::move(e));
}

}  // namespace

TEST_CASE("row and column sum norms") {
  IndexedMatrix a = from_dense({{1, -2}, {3, 4}});
  CHECK(op_norm(a, Exponent(1.0)).value == doctest::Approx(6.0));
  CHECK(op_norm(a, Exponent::inf()).value == doctest::Approx(7.0));
  CHECK(op_norm(a, Exponent(1.0)).kind == NormKind::exact);
  for (Exponent p : {Exponent(1.0), Exponent(1.7), Exponent(2.0),
                     Exponent(5.0), Exponent::inf()})
    CHECK(op_norm(identity(6), p).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(op_norm(a, Exponent(0.0)), ParameterError);
}

TEST_CASE("spectral norm against the closed form") {
  // largest singular value of [[1,2],[3,4]]: Gram trace 30, det 4
  IndexedMatrix a = from_dense({{1, 2}, {3, 4}});
  double expected = std::sqrt((30.0 + std::sqrt(900.0 - 16.0)) / 2.0);
  CHECK(op_norm(a, Exponent(2.0)).value ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("interpolated norms carry their flag and a witness floor") {
  IndexedMatrix a = from_dense({{1, -2}, {3, 4}});
  auto r = op_norm(a, Exponent(1.5));
  CHECK(r.kind == NormKind::upper_bound);
  CHECK(r.lower_bound <= r.value + 1e-12);
  CHECK(r.value == doctest::Approx(std::pow(6.0, 2.0 / 3.0) *
                                   std::pow(7.0, 1.0 / 3.0)));
  // p < 1: max column quasi-norm, attained by a basis witness
  auto q = op_norm(a, Exponent(0.5));
  CHECK(q.kind == NormKind::exact);
  double col0 = std::pow(std::pow(1.0, 0.5) + std::pow(3.0, 0.5), 2.0);
  double col1 = std::pow(std::pow(2.0, 0.5) + std::pow(4.0, 0.5), 2.0);
  CHECK(q.value == doctest::Approx(std::max(col0, col1)));
}

TEST_CASE("adjoint swaps the endpoint norms exactly") {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 30; ++t) {
    IndexedMatrix a =
        zoo::random_thin_sparse(z(40), 2, 5, 0.6, gen(), false);
    CHECK(op_norm(a, Exponent(1.0)).value ==
          op_norm(adjoint(a), Exponent::inf()).value);
  }
}

TEST_CASE("abs monotonicity within 1e-12") {
  std::mt19937_64 gen(37);
  for (int t = 0; t < 20; ++t) {
    IndexedMatrix a =
        zoo::random_thin_sparse(z(30), 2, 4, 0.7, gen(), false);
    IndexedMatrix b = abs(a);
    for (Exponent p : {Exponent(1.0), Exponent(2.0), Exponent::inf()})
      CHECK(op_norm(a, p).value <= op_norm(b, p).value + 1e-12);
  }
}

TEST_CASE("schur norm equals the endpoint sum through a separate path") {
  CHECK(schur_norm(identity(4)) == doctest::Approx(2.0));
  std::mt19937_64 gen(41);
  for (int t = 0; t < 30; ++t) {
    IndexedMatrix a =
        zoo::random_thin_sparse(z(50), 2, 6, 0.6, gen(), false);
    CHECK(schur_norm(a) == op_norm(a, Exponent(1.0)).value +
                               op_norm(a, Exponent::inf()).value);
  }
}

TEST_CASE("weighted schur and convolution-dominated norms") {
  IndexedMatrix id = identity(5);
  Weight w = Weight::polynomial(2.0);
  CHECK(weighted_schur_norm(id, w) == doctest::Approx(schur_norm(id)));
  CHECK(weighted_schur_norm(id, Weight::subexponential(1.0, 0.5)) ==
        doctest::Approx(2.0));

  IndexedMatrix rw = zoo::random_walk_operator(64);
  CHECK(cd_norm(rw) == doctest::Approx(2.0));  // 1 + 1/2 + 1/2

  IndexedMatrix rect = zoo::staircase_matrix(1.0, 4);
  CHECK_THROWS_AS(weighted_schur_norm(rect, w), StructureError);
  CHECK_THROWS_AS(cd_norm(rect), StructureError);
  // tree-indexed square matrix has no group structure
  auto tree = std::make_shared<const MetricSpace>(MetricSpace::tree(3, 2));
  std::vector<Entry> e{{0, 0, 1.0}};
  IndexedMatrix t = IndexedMatrix::from_entries(tree, 10, true, e);
  CHECK_THROWS_AS(cd_norm(t), StructureError);
}

TEST_CASE("cd norm on a box") {
  auto box = std::make_shared<const MetricSpace>(MetricSpace::zd_box({4, 4}));
  // two translates: identity and the shift by (0,1) halved
  std::vector<Entry> e;
  for (int i = 0; i < 16; ++i) {
    e.push_back({i, i, 1.0});
    if (i % 4 != 3) e.push_back({i + 1, i, 0.5});
  }
  IndexedMatrix a = IndexedMatrix::from_entries(box, 16, true, e);
  CHECK(cd_norm(a) == doctest::Approx(1.5));
}

TEST_CASE("sparse-sparse norm bound") {
  SUBCASE("signed permutation") {
    std::vector<Entry> e{{0, 1, 1.0}, {1, 0, -1.0}, {2, 2, 1.0}};
    IndexedMatrix a = IndexedMatrix::from_entries(z(3), 3, true, e);
    auto r = sparse_sparse_bound(a);
    CHECK(r.v == 1);
    CHECK(r.verified);
    CHECK(r.norm_2 == doctest::Approx(1.0));
  }
  SUBCASE("two entries of mass one per column") {
    std::vector<Entry> e{{0, 0, 1.0}, {1, 0, 1.0}, {2, 1, 1.0}, {3, 1, 1.0}};
    IndexedMatrix a = IndexedMatrix::from_entries(z(2), 4, false, e);
    auto r = sparse_sparse_bound(a);
    CHECK(r.norm_1 <= 2.0 + 1e-12);
    CHECK(r.verified);
  }
  SUBCASE("random instances with budget 3") {
    std::mt19937_64 gen(43);
    for (int t = 0; t < 50; ++t) {
      IndexedMatrix a =
          zoo::random_thin_sparse(z(40), 1, 3, 0.8, gen(), false);
      CHECK(sparse_sparse_bound(a).verified);
    }
  }
}
