#include <doctest.h>

#include <cmath>
#include <random>

#include "lpstab/errors.hpp"
#include "lpstab/stability.hpp"
#include "lpstab/zoo.hpp"

using namespace lpstab;

namespace {

SpacePtr z(int n) {
  return std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
}

}  // namespace

TEST_CASE("tail bound closed form") {
  CHECK(sequence_tail_bound(1.0, Exponent(2.0), 1) == doctest::Approx(0.5));
  CHECK(sequence_tail_bound(1.0, Exponent(2.0), 4) == doctest::Approx(0.25));
  // limit form at q = inf
  CHECK(sequence_tail_bound(1.0, Exponent::inf(), 3) ==
        doctest::Approx(0.25));
  CHECK(sequence_tail_bound(2.0, Exponent::inf(), 3) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(sequence_tail_bound(2.0, Exponent(1.5), 1),
                  ParameterError);
  CHECK_THROWS_AS(sequence_tail_bound(1.0, Exponent(2.0), 0),
                  ParameterError);
}

TEST_CASE("tail bound dominates the flat-vector scan") {
  // the flat vector with k live terms has tail ((k-m)/k^{q/p})^{1/q}; the
  // scan maximum sits near k = m/(1-p/q)
  for (double p : {1.0, 1.5}) {
    for (double q : {2.0, 3.0}) {
      for (int m : {1, 2, 3}) {
        double bound = sequence_tail_bound(p, Exponent(q), m);
        double best = 0.0;
        int best_k = 0;
        for (int k = m + 1; k <= 400; ++k) {
          double v = std::pow((k - m) / std::pow(k, q / p), 1.0 / q);
          if (v > best) { best = v; best_k = k; }
        }
        CHECK(best <= bound + 1e-12);
        double kstar = m / (1.0 - p / q);
        CHECK(std::abs(best_k - kstar) <= 1.0 + 1e-9);
      }
    }
  }
  // integer optimum attains the bound exactly: p=1, q=2, m=1, k*=2
  double attained = std::pow((2 - 1) / std::pow(2.0, 2.0), 0.5);
  CHECK(attained == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("single-column thinning by hand") {
  std::vector<Entry> e{{0, 0, 0.5}, {1, 0, 0.3}, {2, 0, 0.2}};
  IndexedMatrix a = IndexedMatrix::from_entries(z(1), 3, false, e);
  auto res = top_m_thinning(a, 1, 1.0, Exponent(2.0));
  CHECK(res.scale == doctest::Approx(1.0));  // already unit l1 mass
  REQUIRE(res.A_m.entries().size() == 1);
  CHECK(res.A_m.entries()[0].value == doctest::Approx(0.5));
  CHECK(res.measured_2 == doctest::Approx(std::sqrt(0.13)));
  CHECK(res.v_of_r == doctest::Approx(1.0));
  CHECK(res.bound == doctest::Approx(0.5));
  CHECK(res.measured_2 <= res.bound);
}

TEST_CASE("ties keep the smallest row id") {
  std::vector<Entry> e{{0, 0, 0.5}, {1, 0, -0.5}, {2, 0, 0.5}};
  IndexedMatrix a = IndexedMatrix::from_entries(z(1), 3, false, e);
  auto res = top_m_thinning(a, 2, 1.0, Exponent(2.0));
  REQUIRE(res.A_m.entries().size() == 2);
  CHECK(res.A_m.entries()[0].row == 0);
  CHECK(res.A_m.entries()[1].row == 1);
}

TEST_CASE("keeping every entry is lossless, not an error") {
  IndexedMatrix a = zoo::random_thin_sparse(z(30), 2, 4, 0.7, 83, false);
  auto res = top_m_thinning(a, 64, 1.0, Exponent(2.0));
  CHECK(res.measured_1 == 0.0);
  CHECK(res.measured_2 == 0.0);
  CHECK(res.measured_inf == 0.0);
  CHECK(res.A_m.entries().size() == a.entries().size());
}

TEST_CASE("staircase thinning stays within the scaled bound") {
  IndexedMatrix s = zoo::staircase_matrix(1.0, 16);
  auto res = top_m_thinning(s, 4, 1.0, Exponent(2.0));
  // 1/2 * 4^{-1/2} * v(r)^{1/2}
  double expected =
      0.5 * std::pow(4.0, -0.5) * std::sqrt(res.v_of_r);
  CHECK(res.bound == doctest::Approx(expected));
  CHECK(res.measured_2 <= res.bound * (1 + 1e-12));
}

TEST_CASE("thinning parameter validation") {
  IndexedMatrix a = zoo::random_thin_sparse(z(10), 1, 3, 0.9, 85, false);
  CHECK_THROWS_AS(top_m_thinning(a, 0, 1.0, Exponent(2.0)), ParameterError);
  CHECK_THROWS_AS(top_m_thinning(a, 2, 2.0, Exponent(1.5)), ParameterError);
  CHECK_THROWS_AS(top_m_thinning(a, 2, 0.5, Exponent(0.8)), ParameterError);
  // p below one is fine as long as q >= 1
  CHECK_NOTHROW(top_m_thinning(a, 2, 0.5, Exponent(1.0)));
}
