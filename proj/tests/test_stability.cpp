#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "lpstab/errors.hpp"
#include "lpstab/stability.hpp"
#include "lpstab/zoo.hpp"

using namespace lpstab;

namespace {

SpacePtr z(int n) {
  return std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
}

IndexedMatrix diag(std::vector<double> d) {
  std::vector<Entry> e;
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    e.push_back({i, i, d[i]});
  return IndexedMatrix::from_entries(z(static_cast<int>(d.size())),
                                     static_cast<int>(d.size()), true,
                                     std::move(e));
}

IndexedMatrix random_dense(int m, int n, std::mt19937_64& gen) {
  std::vector<Entry> e;
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < n; ++x)
      e.push_back(
          {y, x, static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0});
  return IndexedMatrix::from_entries(z(n), m, m == n, std::move(e));
}

Eigen::MatrixXd to_eigen(const IndexedMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (const Entry& e : a.entries()) d(e.row, e.col) = e.value;
  return d;
}

}  // namespace

TEST_CASE("exact smallest singular value") {
  CHECK(lambda_exact_2(diag({3, 1, 2})).value == doctest::Approx(1.0));
  CHECK(lambda_exact_2(diag({1, 1, 1, 1})).value == doctest::Approx(1.0));

  // path-graph spectrum oracle for the diffusion window
  for (int n : {20, 100, 500}) {
    double oracle = 1.0 - std::cos(M_PI / (n + 1));
    auto est = lambda_exact_2(zoo::random_walk_operator(n));
    CHECK(est.value == doctest::Approx(oracle).epsilon(1e-9));
    // witness consistency
    CHECK(rayleigh_ratio(zoo::random_walk_operator(n), est.witness,
                         Exponent(2.0)) ==
          doctest::Approx(est.value).epsilon(1e-12));
  }

  // wide matrices have kernel witnesses
  std::vector<Entry> e{{0, 0, 1.0}, {0, 1, 1.0}, {0, 2, 1.0},
                       {1, 1, 1.0}};
  IndexedMatrix wide = IndexedMatrix::from_entries(z(3), 2, false, e);
  auto est = lambda_exact_2(wide);
  CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimizer basics") {
  SUBCASE("identity is flat") {
    IndexedMatrix id = diag({1, 1, 1, 1, 1, 1});
    for (Exponent p :
         {Exponent(1.0), Exponent(2.0), Exponent(3.0), Exponent::inf()})
      CHECK(lambda_estimate(id, p, Budget{8, 100}, 1).value ==
            doctest::Approx(1.0));
  }
  SUBCASE("staircase endpoint witness") {
    IndexedMatrix s = zoo::staircase_matrix(1.0, 16);
    auto est = lambda_estimate(s, Exponent::inf(), Budget{16, 200}, 2);
    CHECK(est.value <= 1.0 / 16.0 + 1e-15);
  }
  SUBCASE("zero matrix") {
    IndexedMatrix zero = IndexedMatrix::from_entries(z(4), 4, true, {});
    CHECK(lambda_estimate(zero, Exponent(2.0), Budget{4, 50}, 3).value ==
          0.0);
  }
  SUBCASE("deterministic for a fixed seed") {
    std::mt19937_64 gen(51);
    IndexedMatrix a = random_dense(9, 9, gen);
    auto e1 = lambda_estimate(a, Exponent(3.0), Budget{12, 150}, 77);
    auto e2 = lambda_estimate(a, Exponent(3.0), Budget{12, 150}, 77);
    CHECK(e1.value == e2.value);
    CHECK(e1.witness == e2.witness);
  }
}

TEST_CASE("optimizer calibration against the singular value") {
  // without its exact start the p=2 search must still land on sigma_min
  std::mt19937_64 gen(53);
  OptimizerOptions opts;
  opts.use_exact_p2_start = false;
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    IndexedMatrix a = random_dense(10, 10, gen);
    double smin = lambda_exact_2(a).value;
    double opt = lambda_estimate(a, Exponent(2.0), Budget{20, 200},
                                 1000 + t, opts)
                     .value;
    CHECK(std::abs(opt - smin) <= 1e-6);
    CHECK(opt >= smin - 1e-6);  // estimates stay above the truth
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("small-window exact values through the inverse route") {
  std::mt19937_64 gen(59);
  for (int t = 0; t < 40; ++t) {
    IndexedMatrix a = random_dense(8, 8, gen);
    Eigen::MatrixXd d = to_eigen(a);
    if (std::abs(d.determinant()) < 1e-8) continue;
    Eigen::MatrixXd inv = d.inverse();
    // independent row/column sum formulas for the inverse norms
    double row_sum = inv.cwiseAbs().rowwise().sum().maxCoeff();
    double col_sum = inv.cwiseAbs().colwise().sum().maxCoeff();
    auto linf = lambda_exact_small(a, Exponent::inf());
    auto l1 = lambda_exact_small(a, Exponent(1.0));
    CHECK(linf.value == doctest::Approx(1.0 / row_sum).epsilon(1e-10));
    CHECK(l1.value == doctest::Approx(1.0 / col_sum).epsilon(1e-10));
    // witnesses realize the claimed ratios
    CHECK(rayleigh_ratio(a, linf.witness, Exponent::inf()) ==
          doctest::Approx(linf.value).epsilon(1e-12));
    CHECK(rayleigh_ratio(a, l1.witness, Exponent(1.0)) ==
          doctest::Approx(l1.value).epsilon(1e-12));
    // the optimizer can only sit above the exact value
    double upper = lambda_estimate(a, Exponent::inf(), Budget{16, 150},
                                   t)
                       .value;
    CHECK(upper >= linf.value - 1e-9);
  }
  // singular windows report zero
  IndexedMatrix sing = diag({1, 0, 2});
  CHECK(lambda_exact_small(sing, Exponent(1.0)).value == 0.0);
  CHECK_THROWS_AS(lambda_exact_small(zoo::staircase_matrix(1.0, 4),
                                     Exponent(1.0)),
                  StructureError);
}

TEST_CASE("one-step propagation bound") {
  PropagationConstants c;
  c.d = 1.0;
  c.r = 1.0;
  c.v = 3.0;
  c.K = 18.0;
  SUBCASE("no gap reduces to division by K") {
    CHECK(propagation_bound(0.9, Exponent(2.0), Exponent(2.0), c) ==
          doctest::Approx(0.05));
  }
  SUBCASE("half gap from inf to 2") {
    // (0.9 / (18 sqrt 3))^2 = 0.81 / 972
    double b = propagation_bound(0.9, Exponent(2.0), Exponent::inf(), c);
    CHECK(b == doctest::Approx(8.3333e-4).epsilon(1e-4));
    CHECK(b == doctest::Approx(0.81 / 972.0));
  }
  SUBCASE("vanishing propagates vacuously") {
    CHECK(propagation_bound(0.0, Exponent(1.0), Exponent(2.0), c) == 0.0);
  }
  SUBCASE("oversized steps are rejected") {
    PropagationConstants c2 = c;
    c2.d = 3.0;
    CHECK_THROWS_AS(
        propagation_bound(0.5, Exponent(1.0), Exponent::inf(), c2),
        ParameterError);
  }
  SUBCASE("thin-only variant needs p <= q") {
    CHECK_NOTHROW(propagation_bound(0.5, Exponent(2.0), Exponent(3.0), c,
                                    PropagationVariant::ThinOnly));
    CHECK_THROWS_AS(propagation_bound(0.5, Exponent(3.0), Exponent(2.0), c,
                                      PropagationVariant::ThinOnly),
                    ParameterError);
  }
  SUBCASE("monotone in the known bound") {
    double prev = 0.0;
    for (double lq : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      double b = propagation_bound(lq, Exponent(2.0), Exponent::inf(), c);
      CHECK(b > prev);
      prev = b;
    }
  }
}

TEST_CASE("chained propagation") {
  SUBCASE("dimension one takes two half steps and exponent 4") {
    StabilityReport rep;
    rep.estimates.push_back({Exponent(1.0), 0.2, {}, LambdaMethod::optimizer,
                             0, 0, 0});
    rep.estimates.push_back({Exponent::inf(), 0.9, {}, LambdaMethod::optimizer,
                             0, 0, 0});
    rep.lambda_small = 0.2;
    rep.Lambda_big = 0.9;
    rep.p_m = Exponent(1.0);
    rep.p_M = Exponent::inf();
    PropagationConstants c;
    c.d = 1.0;
    c.r = 1.0;
    c.v = 3.0;
    c.K = 18.0;
    IndexedMatrix id = diag({1, 1, 1});
    ChainResult res = chain_propagation(rep, c, id);
    CHECK(res.steps.size() == 2);
    CHECK(res.Lambda_exponent == doctest::Approx(4.0));
    CHECK(res.consistent);  // bound is tiny against lambda = 0.2
  }
  SUBCASE("identity satisfies the interval single-step check") {
    IndexedMatrix id = diag({1, 1, 1, 1});
    auto grid = default_p_grid();
    StabilityReport rep = stability_report(id, grid, Budget{8, 80}, 5);
    ChainResult res =
        chain_propagation(rep, PropagationConstants::z_constants(id), id);
    REQUIRE(res.zrem2.has_value());
    CHECK(res.zrem2->holds);  // 1 >= 1/162
    CHECK(res.zrem2->denominator == doctest::Approx(162.0));
  }
}

TEST_CASE("stability report shape and verdicts") {
  auto grid = default_p_grid();
  IndexedMatrix id = diag({1, 1, 1, 1, 1});
  StabilityReport rep = stability_report(id, grid, Budget{8, 60}, 9);
  CHECK(rep.verdict == Verdict::uniformly_bounded_below);
  CHECK(rep.lambda_small == doctest::Approx(1.0));
  CHECK(rep.Lambda_big == doctest::Approx(1.0));

  IndexedMatrix zero = IndexedMatrix::from_entries(z(4), 4, true, {});
  StabilityReport zrep = stability_report(zero, grid, Budget{4, 30}, 9);
  CHECK(zrep.verdict == Verdict::degenerate);

  std::vector<Exponent> sparse{Exponent(2.0)};
  CHECK_THROWS_AS(stability_report(id, sparse, Budget{4, 30}, 1),
                  ParameterError);
  CHECK_NOTHROW(stability_report(id, sparse, Budget{4, 30}, 1,
                                 /*allow_sparse_grid=*/true));
}

TEST_CASE("almost thin-sparse localization") {
  SUBCASE("preset exponent") {
    CHECK(PropagationConstants::preset_u(2.0, 1.0, 1.0) ==
          doctest::Approx(0.5));
    auto pre = almost_ts_preset(0.01, 2.0, 1.0, 1.0);
    CHECK(pre.u == doctest::Approx(0.5));
    CHECK(pre.L == doctest::Approx(std::pow(0.01, -2.0)));
    CHECK(pre.r == doctest::Approx(std::sqrt(pre.L)));
  }
  SUBCASE("exact family degenerates to the plain certificate") {
    IndexedMatrix a = zoo::random_thin_sparse(z(300), 2, 5, 0.8, 61, true);
    std::vector<double> f(300);
    std::mt19937_64 gen(62);
    for (double& x : f)
      x = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
    auto family = [&](double, double) { return a; };
    auto res = almost_ts_localize(a, family, f, 16.0, Exponent(2.0), 2.0,
                                  1.0, 1.0);
    CHECK(res.certificate.approx_error == 0.0);
    CHECK(res.certificate.holds);
    CHECK(res.certificate.inner.holds);
  }
  SUBCASE("polynomial tails against the band-truncation family") {
    IndexedMatrix a = zoo::polynomial_decay_matrix(z(400), 3.0, 63);
    std::vector<double> f(400, 1.0);
    auto family = [&](double r, double) {
      std::vector<Entry> kept;
      for (const Entry& e : a.entries())
        if (std::abs(e.row - e.col) <= r) kept.push_back(e);
      return IndexedMatrix::from_entries(a.col_space_ptr(), 400, true,
                                         std::move(kept));
    };
    // row tails: 2 sum_{k>r} (1+k)^-3 <= r^-2, so K = 1, t = 2 works; the
    // sparseness budget v = L^d is loose at this window
    auto res = almost_ts_localize(a, family, f, 64.0, Exponent(1.0), 2.0,
                                  1.0, 1.0);
    CHECK(res.certificate.holds);
    CHECK(res.certificate.approx_error <= res.certificate.decay_budget);
  }
  SUBCASE("violating family is rejected with measurements") {
    IndexedMatrix a = zoo::random_thin_sparse(z(100), 2, 5, 0.8, 64, true);
    std::vector<double> f(100, 1.0);
    auto bogus = [&](double, double) {
      return IndexedMatrix::from_entries(a.col_space_ptr(), 100, true, {});
    };
    try {
      almost_ts_localize(a, bogus, f, 16.0, Exponent(1.0), 2.0, 1.0, 1e-6);
      FAIL("expected DecayViolationError");
    } catch (const DecayViolationError& e) {
      CHECK(e.measured_norm > e.allowed_bound);
    }
  }
}
