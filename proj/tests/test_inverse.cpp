#include <doctest.h>

#include <cmath>
#include <random>

#include "lpstab/errors.hpp"
#include "lpstab/inverse.hpp"
#include "lpstab/zoo.hpp"

using namespace lpstab;

namespace {

SpacePtr z(int n) {
  return std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
}

IndexedMatrix identity(int n) {
  std::vector<Entry> e;
  for (int i = 0; i < n; ++i) e.push_back({i, i, 1.0});
  return IndexedMatrix::from_entries(z(n), n, true, std::move(e));
}

IndexedMatrix diag(std::vector<double> d) {
  std::vector<Entry> e;
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    e.push_back({i, i, d[i]});
  return IndexedMatrix::from_entries(z(static_cast<int>(d.size())),
                                     static_cast<int>(d.size()), true,
                                     std::move(e));
}

IndexedMatrix elliptic(int n) {
  std::vector<Entry> e;
  for (int x = 0; x < n; ++x) {
    e.push_back({x, x, 1.5});
    if (x > 0) e.push_back({x, x - 1, -0.5});
    if (x + 1 < n) e.push_back({x, x + 1, -0.5});
  }
  return IndexedMatrix::from_entries(z(n), n, true, std::move(e));
}

// two-sided interval tail sum oracle for the truncation error around an
// interior point
double schur_tail_oracle(double beta, int r, int reach) {
  double row = 0.0;
  for (int k = r + 1; k <= reach; ++k) row += 2.0 * std::pow(1.0 + k, -beta);
  return 2.0 * row;
}

}  // namespace

TEST_CASE("band truncation") {
  IndexedMatrix rw = zoo::random_walk_operator(40);
  IndexedMatrix same = band_truncate(rw, 1.0);
  CHECK(same.entries().size() == rw.entries().size());
  IndexedMatrix d = band_truncate(rw, 0.0);
  CHECK(static_cast<int>(d.entries().size()) == 40);
  CHECK(d.stats().band_width.value() == 0.0);
  CHECK_THROWS_AS(band_truncate(zoo::staircase_matrix(1.0, 4), 1.0),
                  StructureError);
}

TEST_CASE("truncation error matches the tail-sum oracle") {
  const int n = 801;
  IndexedMatrix a = zoo::polynomial_decay_matrix(z(n), 3.0, 87);
  for (int r : {8, 16, 32}) {
    std::vector<Entry> tail;
    for (const Entry& e : a.entries())
      if (std::abs(e.row - e.col) > r) tail.push_back(e);
    IndexedMatrix t =
        IndexedMatrix::from_entries(a.col_space_ptr(), n, true, tail);
    double oracle = schur_tail_oracle(3.0, r, n / 2);
    CHECK(schur_norm(t) == doctest::Approx(oracle).epsilon(0.05));
  }
}

TEST_CASE("decay profile fits and classifies") {
  std::vector<double> radii{8, 16, 32, 64, 128};
  SUBCASE("polynomial") {
    IndexedMatrix a = zoo::polynomial_decay_matrix(z(800), 3.0, 89);
    DecayProfile prof = decay_profile(a, radii);
    CHECK(std::abs(prof.fitted_t - 2.0) < 0.2);
    CHECK(prof.decay_class == DecayClass::polynomial);
    for (std::size_t i = 1; i < prof.errors.size(); ++i)
      CHECK(prof.errors[i] <= prof.errors[i - 1]);
  }
  SUBCASE("banded input hits the sentinel") {
    DecayProfile prof = decay_profile(zoo::random_walk_operator(600), radii);
    CHECK(std::isinf(prof.fitted_t));
    CHECK(prof.decay_class == DecayClass::banded);
  }
  SUBCASE("exponential is flagged super-polynomial") {
    IndexedMatrix a = zoo::exponential_decay_matrix(z(500), 91);
    std::vector<double> rs{8, 16, 32, 64};
    DecayProfile prof = decay_profile(a, rs);
    CHECK(prof.decay_class == DecayClass::super_polynomial);
  }
  SUBCASE("needs three radii") {
    std::vector<double> rs{2, 4};
    CHECK_THROWS_AS(decay_profile(zoo::random_walk_operator(100), rs),
                    ParameterError);
  }
}

TEST_CASE("left inverse construction") {
  SUBCASE("identity inverts to itself") {
    auto res = build_left_inverse(identity(12));
    CHECK(res.diagnostics.ba_minus_i_max <= 1e-14);
    for (const Entry& e : res.B.entries()) {
      CHECK(e.row == e.col);
      CHECK(e.value == doctest::Approx(1.0));
    }
  }
  SUBCASE("orthonormal columns give the adjoint") {
    std::vector<Entry> e{{0, 0, 1.0}, {2, 1, 1.0}};  // e0, e2 in R^3
    IndexedMatrix a = IndexedMatrix::from_entries(z(2), 3, false, e);
    auto res = build_left_inverse(a);
    REQUIRE(res.B.entries().size() == 2);
    CHECK(res.B.entries()[0].row == 0);
    CHECK(res.B.entries()[0].col == 0);
    CHECK(res.B.entries()[1].row == 1);
    CHECK(res.B.entries()[1].col == 2);
    CHECK(res.diagnostics.ba_minus_i_max <= 1e-14);
  }
  SUBCASE("well-conditioned banded window") {
    std::mt19937_64 gen(93);
    std::vector<Entry> e;
    const int n = 300;
    for (int y = 0; y < n; ++y) {
      e.push_back({y, y, 3.0});
      for (int x = std::max(0, y - 2); x <= std::min(n - 1, y + 2); ++x)
        if (x != y)
          e.push_back(
              {y, x, static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0});
    }
    IndexedMatrix a = IndexedMatrix::from_entries(z(n), n, true, e);
    auto res = build_left_inverse(a);
    CHECK(res.diagnostics.sigma_min >= 0.5);
    CHECK(res.diagnostics.ba_minus_i_max <= 1e-8);
    CHECK(res.diagnostics.gram_propagation <= res.diagnostics.gram_limit);
    REQUIRE(res.diagnostics.b_offband.has_value());
  }
  SUBCASE("singular input carries sigma_min in the error") {
    try {
      build_left_inverse(diag({1, 0, 2}));
      FAIL("expected NotBoundedBelowError");
    } catch (const NotBoundedBelowError& e) {
      CHECK(e.sigma_min <= 1e-12);
    }
  }
}

TEST_CASE("self-adjoint inverse norm identity") {
  SUBCASE("diagonal") {
    IndexedMatrix a = diag({2, 4});
    for (Exponent p : {Exponent(1.0), Exponent(2.0), Exponent::inf()}) {
      auto res = selfadjoint_inverse_norm_check(a, p);
      CHECK(res.lhs == doctest::Approx(0.5));
      CHECK(res.rhs == doctest::Approx(0.5));
      CHECK(res.gap <= 1e-9);
    }
  }
  SUBCASE("identity") {
    auto res = selfadjoint_inverse_norm_check(identity(6), Exponent(2.0));
    CHECK(res.lhs == doctest::Approx(1.0));
    CHECK(res.rhs == doctest::Approx(1.0));
  }
  SUBCASE("random positive definite at p = 2") {
    std::mt19937_64 gen(95);
    for (int t = 0; t < 10; ++t) {
      std::vector<std::vector<double>> r(10, std::vector<double>(10));
      for (auto& row : r)
        for (double& x : row)
          x = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
      std::vector<Entry> e;
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
          double v = (i == j) ? 0.5 : 0.0;
          for (int k = 0; k < 10; ++k) v += r[k][i] * r[k][j];
          e.push_back({i, j, v});
        }
      IndexedMatrix a = IndexedMatrix::from_entries(z(10), 10, true, e);
      auto res = selfadjoint_inverse_norm_check(a, Exponent(2.0), gen());
      CHECK(res.gap <= 1e-9);
    }
  }
  SUBCASE("asymmetric input is rejected") {
    std::vector<Entry> e{{0, 1, 1.0}, {1, 0, 2.0}, {0, 0, 1.0}, {1, 1, 1.0}};
    IndexedMatrix a = IndexedMatrix::from_entries(z(2), 2, true, e);
    CHECK_THROWS_AS(selfadjoint_inverse_norm_check(a, Exponent(2.0)),
                    StructureError);
  }
}

TEST_CASE("Gram lambda identity") {
  CHECK(gram_lambda_identity_check(identity(5)).gap <= 1e-12);
  CHECK(gram_lambda_identity_check(diag({3, 1, 2})).lambda2_gram ==
        doctest::Approx(1.0));
  std::mt19937_64 gen(97);
  for (int t = 0; t < 25; ++t) {
    std::vector<Entry> e;
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 12; ++x)
        e.push_back(
            {y, x, static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0});
    IndexedMatrix a = IndexedMatrix::from_entries(z(12), 20, false, e);
    CHECK(gram_lambda_identity_check(a).gap <= 1e-9);
  }
}

TEST_CASE("pipeline on the three reference operators") {
  auto grid = default_p_grid();
  Weight w = Weight::polynomial(1.0);
  PipelineOptions opts;
  opts.seed = 3;
  opts.budget = Budget{12, 150};

  SUBCASE("identity window") {
    PipelineReport rep = stability_pipeline(identity(64), w, grid, opts);
    CHECK(rep.verdict == Verdict::uniformly_bounded_below);
    REQUIRE(rep.inverse.has_value());
    CHECK(rep.inverse->diagnostics.ba_minus_i_max <= 1e-12);
    for (const auto& row : rep.rows) {
      if (!row.norm_B_p) continue;
      CHECK(*row.norm_B_p == doctest::Approx(1.0));
      CHECK(*row.weighted_schur_B == doctest::Approx(2.0));
    }
  }
  SUBCASE("elliptic window stays uniformly bounded below") {
    PipelineReport rep = stability_pipeline(elliptic(128), w, grid, opts);
    CHECK(rep.verdict == Verdict::uniformly_bounded_below);
    REQUIRE(rep.inverse.has_value());
    CHECK(rep.inverse->diagnostics.ba_minus_i_max <= 1e-8);
    CHECK(rep.trend_exponent < 0.1);
    double lo = 1e300, hi = 0.0;
    for (const auto& row : rep.rows)
      if (row.schur_B) {
        lo = std::min(lo, *row.schur_B);
        hi = std::max(hi, *row.schur_B);
      }
    CHECK(hi <= 2.0 * lo);
  }
  SUBCASE("diffusion window degenerates with the exact spectrum") {
    PipelineReport rep =
        stability_pipeline(zoo::random_walk_operator(128), w, grid, opts);
    CHECK(rep.verdict == Verdict::degenerate);
    for (std::size_t i = 0; i < rep.windows.size(); ++i) {
      double oracle = 1.0 - std::cos(M_PI / (rep.windows[i] + 1));
      CHECK(rep.lambda2_by_window[i] ==
            doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(rep.trend_exponent > 1.5);
  }
}
