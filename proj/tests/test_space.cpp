#include <doctest.h>

#include <cmath>
#include <random>

#include "lpstab/errors.hpp"
#include "lpstab/space.hpp"

using namespace lpstab;

namespace {

// independent count of the rooted tree ball: root has `degree` children,
// every later generation multiplies by degree-1
int tree_size_oracle(int degree, int radius) {
  int total = 1, level = 0;
  for (int d = 1; d <= radius; ++d) {
    level = (d == 1) ? degree : level * (degree - 1);
    total += level;
  }
  return total;
}

}  // namespace

TEST_CASE("interval volumes and doubling") {
  MetricSpace s = MetricSpace::z_interval(101);
  CHECK(s.size() == 101);
  CHECK(s.volume(50, 3) == 7);  // {47..53}
  CHECK(s.volume(0, 3) == 4);
  CHECK(s.distance(10, 40) == 30);

  MetricSpace big = MetricSpace::z_interval(1001);
  CHECK(big.doubling_D() <= 2.0);
  CHECK(big.growth_K() >= 1.0);
  // sampled growth invariant V(x,R) <= K R^d
  std::mt19937_64 gen(7);
  for (int t = 0; t < 200; ++t) {
    int x = static_cast<int>(gen() % 1001);
    for (double r = 1.0; r <= 1000.0; r *= 4.0)
      CHECK(big.volume(x, r) <=
            big.growth_K() * std::pow(r, big.growth_d()) + 1e-9);
  }
}

TEST_CASE("box metric is the sup metric") {
  MetricSpace s = MetricSpace::zd_box({5, 7});
  CHECK(s.size() == 35);
  // point (a,b) has id a*7+b
  CHECK(s.distance(0 * 7 + 0, 4 * 7 + 6) == 6);
  CHECK(s.distance(2 * 7 + 3, 2 * 7 + 3) == 0);
  CHECK(s.distance(1 * 7 + 1, 3 * 7 + 2) == 2);
  // volume against a brute count
  for (int x : {0, 17, 34}) {
    for (double r : {1.0, 2.0, 3.0}) {
      int count = 0;
      for (int y = 0; y < s.size(); ++y)
        if (s.distance(x, y) <= r) ++count;
      CHECK(s.volume(x, r) == count);
    }
  }
}

TEST_CASE("tree ball size and distances") {
  MetricSpace t = MetricSpace::tree(3, 2);
  CHECK(t.size() == 10);  // 1 + 3 + 6
  CHECK(t.size() == tree_size_oracle(3, 2));
  CHECK(MetricSpace::tree(3, 4).size() == tree_size_oracle(3, 4));
  CHECK(MetricSpace::tree(4, 3).size() == tree_size_oracle(4, 3));
  // siblings sit at distance 2, leaves under different root children at 4
  CHECK(t.distance(1, 2) == 2);
  CHECK(t.distance(4, 6) == 4);
  CHECK(t.distance(0, 4) == 2);
}

TEST_CASE("explicit tables are validated") {
  CHECK_NOTHROW(MetricSpace::explicit_table(
      {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
  CHECK_THROWS_AS(MetricSpace::explicit_table({{0, 1}, {2, 0}}), FormatError);
  CHECK_THROWS_AS(MetricSpace::explicit_table({{0, -1}, {-1, 0}}),
                  FormatError);
  // 0-distance between distinct points
  CHECK_THROWS_AS(MetricSpace::explicit_table({{0, 0}, {0, 0}}),
                  InvalidMetricError);
  // d(0,2) = 5 > 1 + 1
  CHECK_THROWS_AS(
      MetricSpace::explicit_table({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}),
      InvalidMetricError);
}

TEST_CASE("greedy covering on the interval") {
  MetricSpace s = MetricSpace::z_interval(100);
  BallCovering cov = covering(s, 10.0, 6.0);
  REQUIRE(cov.centers.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(cov.centers[i] == 11 * i);
  auto chk = check_covering(s, cov);
  CHECK(chk.covers);
  CHECK(chk.separated);
  CHECK(chk.color_bound);
  // exhaustive same-color pairwise distances
  for (std::size_t i = 0; i < cov.centers.size(); ++i)
    for (std::size_t j = i + 1; j < cov.centers.size(); ++j)
      if (cov.color[i] == cov.color[j])
        CHECK(s.distance(cov.centers[i], cov.centers[j]) >= 60.0);
}

TEST_CASE("one ball covers when L reaches the diameter") {
  MetricSpace s = MetricSpace::z_interval(40);
  BallCovering cov = covering(s, 40.0, 6.0);
  CHECK(cov.centers.size() == 1);
  CHECK(cov.num_colors == 1);
  CHECK(check_covering(s, cov).covers);
}

TEST_CASE("color class selection keeps a 1/num_colors share") {
  MetricSpace s = MetricSpace::z_interval(200);
  BallCovering cov = covering(s, 8.0, 6.0);
  SUBCASE("point mass is fully captured") {
    std::vector<double> f(200, 0.0);
    f[77] = 1.0;
    auto sel = select_color_class(f, cov, s, Exponent(2.0));
    CHECK(sel.ratio == doctest::Approx(1.0));
  }
  SUBCASE("constant and random functions meet the pigeonhole share") {
    std::mt19937_64 gen(21);
    for (Exponent p : {Exponent(1.0), Exponent(2.0), Exponent::inf()}) {
      std::vector<double> c(200, 1.0);
      CHECK(select_color_class(c, cov, s, p).ratio >=
            1.0 / cov.num_colors - 1e-12);
      for (int t = 0; t < 25; ++t) {
        std::vector<double> f(200);
        for (double& x : f)
          x = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
        CHECK(select_color_class(f, cov, s, p).ratio >=
              1.0 / cov.num_colors - 1e-12);
      }
    }
  }
  SUBCASE("zero input is rejected") {
    std::vector<double> z(200, 0.0);
    CHECK_THROWS_AS(select_color_class(z, cov, s, Exponent(1.0)),
                    DegenerateInputError);
  }
}

TEST_CASE("cutoff values and the four properties") {
  MetricSpace s = MetricSpace::z_interval(200);
  CutoffProfile prof = cutoff({0}, 5.0, s);
  CHECK(prof.values[0] == doctest::Approx(1.0));
  CHECK(prof.values[5] == doctest::Approx(0.5));
  CHECK(prof.values[10] == doctest::Approx(0.0));

  CutoffProfile two = cutoff({0, 60}, 5.0, s);
  CHECK(two.values[30] == 0.0);  // 30 >= 2L from both centers
  CHECK(two.values[60] == 1.0);

  CHECK_THROWS_AS(cutoff({}, 5.0, s), DegenerateInputError);
  CHECK_THROWS_AS(cutoff({0}, 0.0, s), ParameterError);

  auto chk = check_cutoff(two, s, /*exhaustive_lipschitz=*/true);
  CHECK(chk.support_ok);
  CHECK(chk.lower_half_ok);
  CHECK(chk.lipschitz_ok);
  CHECK(chk.range_ok);

  // a random center set on a box, exhaustively
  MetricSpace box = MetricSpace::zd_box({20, 20});
  CutoffProfile bx = cutoff({3, 250, 399}, 4.0, box);
  auto bchk = check_cutoff(bx, box, true);
  CHECK(bchk.support_ok);
  CHECK(bchk.lower_half_ok);
  CHECK(bchk.lipschitz_ok);
  CHECK(bchk.range_ok);
}

TEST_CASE("enclosing ball matches a brute-force scan") {
  std::mt19937_64 gen(5);
  for (const MetricSpace& s :
       {MetricSpace::z_interval(60), MetricSpace::zd_box({9, 8}),
        MetricSpace::tree(3, 4)}) {
    for (int t = 0; t < 40; ++t) {
      int k = 1 + static_cast<int>(gen() % 6);
      std::vector<int> pts;
      for (int i = 0; i < k; ++i)
        pts.push_back(static_cast<int>(gen() % s.size()));
      auto ball = s.enclosing_ball(pts);
      double best = 1e300;
      for (int c = 0; c < s.size(); ++c) {
        double rad = 0.0;
        for (int p : pts) rad = std::max(rad, s.distance(c, p));
        best = std::min(best, rad);
      }
      CHECK(ball.radius == doctest::Approx(best));
      double realized = 0.0;
      for (int p : pts) realized = std::max(realized, s.distance(ball.center, p));
      CHECK(realized == doctest::Approx(ball.radius));
    }
  }
}

TEST_CASE("tree metric satisfies the axioms exhaustively") {
  MetricSpace t = MetricSpace::tree(3, 3);
  const int n = t.size();
  for (int a = 0; a < n; ++a) {
    CHECK(t.distance(a, a) == 0.0);
    for (int b = a + 1; b < n; ++b) {
      CHECK(t.distance(a, b) == t.distance(b, a));
      CHECK(t.distance(a, b) > 0.0);
      for (int c = 0; c < n; ++c)
        CHECK(t.distance(a, b) <= t.distance(a, c) + t.distance(c, b));
    }
  }
  // depths pin the radial structure
  CHECK(t.tree_depth(0) == 0);
  CHECK(t.distance(0, n - 1) == 3.0);
}

TEST_CASE("covering and cutoff on a tree") {
  MetricSpace t = MetricSpace::tree(3, 4);
  for (double L : {1.0, 2.0}) {
    BallCovering cov = covering(t, L, 6.0);
    auto chk = check_covering(t, cov);
    CHECK(chk.covers);
    CHECK(chk.separated);
    CHECK(chk.color_bound);
    std::vector<int> P;
    for (std::size_t i = 0; i < cov.centers.size(); ++i)
      if (cov.color[i] == 1) P.push_back(cov.centers[i]);
    auto ck = check_cutoff(cutoff(P, L, t), t, true);
    CHECK(ck.support_ok);
    CHECK(ck.lower_half_ok);
    CHECK(ck.lipschitz_ok);
    CHECK(ck.range_ok);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(MetricSpace::z_interval(0), ParameterError);
  CHECK_THROWS_AS(MetricSpace::tree(1, 2), ParameterError);
  CHECK_THROWS_AS(MetricSpace::zd_box({}), ParameterError);
  MetricSpace s = MetricSpace::z_interval(10);
  CHECK_THROWS_AS(covering(s, 0.0, 6.0), ParameterError);
  CHECK_THROWS_AS(covering(s, 4.0, 0.5), ParameterError);
}
