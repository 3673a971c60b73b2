#include "lpstab/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

#include "lpstab/errors.hpp"
#include "lpstab/inverse.hpp"
#include "lpstab/io.hpp"
#include "lpstab/zoo.hpp"
#include "dense.hpp"
#include "detail.hpp"

namespace lpstab {
namespace verify {

namespace {

using Clock = std::chrono::steady_clock;

struct Failure {
  std::string details;
  std::string counterexample;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

SpacePtr make_z(int n) {
  return std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
}

// ---------------------------------------------------------------------------
// 1. structural facts on random thin matrices: disjoint supports, Gram band,
//    sparse-sparse norm bound
// ---------------------------------------------------------------------------

CriterionResult criterion1(std::uint64_t seed) {
  CriterionResult res{1, "structure: disjoint supports, Gram band, "
                         "sparse-sparse norm bound", false, "", 0.0, {}};
  const int trials = 500;
  std::vector<std::string> fails(trials);
  std::vector<std::string> dumps(trials);
  detail::Rng master(seed ^ 0x1111);
  std::vector<std::uint64_t> salts(trials);
  for (auto& s : salts) s = master.raw();

  detail::parallel_for(trials, [&](int i) {
    detail::Rng rng(salts[i]);
    const int r = 1 + static_cast<int>(rng.uniform_int(4));
    const int n = 50 + static_cast<int>(rng.uniform_int(951));
    IndexedMatrix a = zoo::random_thin_sparse(
        make_z(n), r, 2 * r + 1, 0.8, rng.raw(), /*rows_banded=*/false);

    // (a) inputs with 2r-disjoint supports must map to disjoint outputs
    int w1 = 1 + static_cast<int>(rng.uniform_int(5));
    int w2 = 1 + static_cast<int>(rng.uniform_int(5));
    int gap = 2 * r + 1 + static_cast<int>(rng.uniform_int(6));
    int s1 = static_cast<int>(rng.uniform_int(std::max(1, n - w1 - w2 - gap)));
    int s2 = s1 + w1 + gap;
    std::vector<double> u(n, 0.0), v(n, 0.0);
    for (int j = s1; j < s1 + w1 && j < n; ++j) u[j] = rng.uniform(-1.0, 1.0);
    for (int j = s2; j < s2 + w2 && j < n; ++j) v[j] = rng.uniform(-1.0, 1.0);
    u[s1] = 1.0;
    if (s2 < n) v[s2] = 1.0;
    auto ds = check_disjoint_supports(a, u, v);
    if (ds.precondition_met && !ds.outputs_disjoint) {
      fails[i] = fmt("trial %d: 2r-disjoint inputs produced overlapping "
                     "outputs (gap %.0f, r %d)", i, ds.support_gap, r);
      dumps[i] = "{\"criterion\":1,\"trial\":" + std::to_string(i) +
                 ",\"matrix\":" + io::matrix_to_json(a) + "}";
      return;
    }
    // (b) Gram propagation stays within twice the thickness
    auto gb = check_gram_banded(a);
    if (!gb.holds) {
      fails[i] = fmt("trial %d: Gram band %.2f exceeds %.2f", i,
                     gb.propagation, gb.limit);
      dumps[i] = "{\"criterion\":1,\"trial\":" + std::to_string(i) +
                 ",\"matrix\":" + io::matrix_to_json(a) + "}";
      return;
    }
    // (c) sparse-sparse bound on a smaller window
    const int nc = 40 + static_cast<int>(rng.uniform_int(161));
    IndexedMatrix c = zoo::random_thin_sparse(
        make_z(nc), r, 1 + static_cast<int>(rng.uniform_int(4)), 0.7,
        rng.raw(), false);
    auto ss = sparse_sparse_bound(c);
    if (!ss.verified) {
      fails[i] = fmt("trial %d: norm bound %.6g violated (1:%.6g 2:%.6g "
                     "inf:%.6g)", i, ss.bound, ss.norm_1, ss.norm_2,
                     ss.norm_inf);
      dumps[i] = "{\"criterion\":1,\"trial\":" + std::to_string(i) +
                 ",\"matrix\":" + io::matrix_to_json(c) + "}";
    }
  });

  int bad = 0;
  for (int i = 0; i < trials; ++i)
    if (!fails[i].empty()) {
      ++bad;
      if (res.details.empty()) {
        res.details = fails[i];
        if (!dumps[i].empty()) res.counterexample = dumps[i];
      }
    }
  res.pass = bad == 0;
  if (res.pass)
    res.details = fmt("%d instances, all three structural facts hold",
                      trials);
  return res;
}

// ---------------------------------------------------------------------------
// 2. covering and cutoff invariants, exhaustively on an interval window and
//    a square box
// ---------------------------------------------------------------------------

CriterionResult criterion2(std::uint64_t) {
  CriterionResult res{2, "space: covering and cutoff invariants (exhaustive)",
                      false, "", 0.0, {}};
  struct Case {
    MetricSpace space;
    const char* label;
  };
  std::vector<Case> cases;
  cases.push_back({MetricSpace::z_interval(10000), "Z[10000]"});
  cases.push_back({MetricSpace::zd_box({60, 60}), "Z2[60x60]"});
  for (const Case& c : cases) {
    for (double L : {4.0, 16.0, 64.0}) {
      BallCovering cov = covering(c.space, L, 6.0);
      auto cc = check_covering(c.space, cov);
      if (!cc.covers || !cc.separated || !cc.color_bound) {
        res.details = fmt("%s L=%g: covering invariant failed (covers=%d "
                          "separated=%d colors<=deg+1=%d)", c.label, L,
                          cc.covers, cc.separated, cc.color_bound);
        return res;
      }
      // cutoff properties for every color class; the O(n^2) Lipschitz scan
      // runs on the first class
      for (int color = 1; color <= cov.num_colors; ++color) {
        std::vector<int> P;
        for (std::size_t i = 0; i < cov.centers.size(); ++i)
          if (cov.color[i] == color) P.push_back(cov.centers[i]);
        if (P.empty()) continue;
        CutoffProfile prof = cutoff(P, L, c.space);
        auto ck = check_cutoff(prof, c.space, /*exhaustive=*/color == 1);
        if (!ck.support_ok || !ck.lower_half_ok || !ck.lipschitz_ok ||
            !ck.range_ok) {
          res.details = fmt("%s L=%g color %d: cutoff property failed "
                            "(support=%d half=%d lipschitz=%d range=%d)",
                            c.label, L, color, ck.support_ok,
                            ck.lower_half_ok, ck.lipschitz_ok, ck.range_ok);
          return res;
        }
      }
    }
  }
  res.pass = true;
  res.details = "interval 10^4 and 60x60 box, L in {4,16,64}, alpha=6";
  return res;
}

// ---------------------------------------------------------------------------
// 3. localization certificate with the sharp interval constants
// ---------------------------------------------------------------------------

CriterionResult criterion3(std::uint64_t seed) {
  CriterionResult res{3, "localization certificate, interval constants "
                         "3*(ratio + 3r^2|A|/L)", false, "", 0.0, {}};
  const int trials = 200;
  const int n = 4000;
  std::vector<std::string> fails(trials);
  std::vector<std::string> dumps(trials);
  detail::Rng master(seed ^ 0x3333);
  std::vector<std::uint64_t> salts(trials);
  for (auto& s : salts) s = master.raw();

  detail::parallel_for(trials, [&](int i) {
    detail::Rng rng(salts[i]);
    const int r = 1 + static_cast<int>(rng.uniform_int(3));
    IndexedMatrix a = zoo::random_thin_sparse(make_z(n), r, 2 * r + 1, 0.85,
                                              rng.raw(), /*rows_banded=*/true);
    std::vector<double> f(n);
    for (double& x : f) x = rng.uniform(-1.0, 1.0);
    for (double L : {8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
      for (Exponent p : {Exponent(1.0), Exponent(2.0), Exponent::inf()}) {
        auto loc = localize(a, f, L, p);
        const auto& c = loc.certificate;
        std::string bad;
        if (c.support_radius > 2.0 * L + 1e-9)
          bad = fmt("trial %d L=%g p=%s: support radius %.3f > 2L", i, L,
                    p.str().c_str(), c.support_radius);
        else if (!c.holds)
          bad = fmt("trial %d L=%g p=%s: ratio %.6g > bound %.6g "
                    "(ratio_f %.6g)", i, L, p.str().c_str(), c.ratio_h,
                    c.bound, c.ratio_f);
        else if (c.additivity_gap > 1e-9)
          bad = fmt("trial %d L=%g p=%s: ball additivity gap %.3g", i, L,
                    p.str().c_str(), c.additivity_gap);
        if (!bad.empty()) {
          fails[i] = bad;
          dumps[i] = "{\"criterion\":3,\"trial\":" + std::to_string(i) +
                     ",\"matrix\":" + io::matrix_to_json(a) + "}";
          return;
        }
      }
    }
  });
  int bad = 0;
  for (int i = 0; i < trials; ++i)
    if (!fails[i].empty()) {
      ++bad;
      if (res.details.empty()) {
        res.details = fails[i];
        if (!dumps[i].empty()) res.counterexample = dumps[i];
      }
    }
  res.pass = bad == 0;
  if (res.pass)
    res.details = fmt("%d pairs, L in {8..256}, p in {1,2,inf}: certificate "
                      "and 2L support hold", trials);
  return res;
}

// ---------------------------------------------------------------------------
// 4. ordered-sequence tail bound versus brute force
// ---------------------------------------------------------------------------

double tail_q_norm(const std::vector<double>& a, int m, Exponent q) {
  if (q.is_inf())
    return m < static_cast<int>(a.size()) ? a[m] : 0.0;
  double s = 0.0;
  for (std::size_t i = m; i < a.size(); ++i) s += std::pow(a[i], q.value());
  return std::pow(s, 1.0 / q.value());
}

CriterionResult criterion4(std::uint64_t seed) {
  CriterionResult res{4, "ordered-sequence tail bound dominates brute force",
                      false, "", 0.0, {}};
  const int nmax = 12;
  detail::Rng rng(seed ^ 0x4444);
  for (double p : {1.0, 1.5, 2.0}) {
    for (double qv : {p + 0.5, p + 1.0, 4.0, -1.0 /* inf */}) {
      Exponent q = qv < 0.0 ? Exponent::inf() : Exponent(qv);
      for (int m = 1; m <= 8; ++m) {
        const double bound = sequence_tail_bound(p, q, m);
        double brute = 0.0;
        // flat vectors a_i = k^{-1/p}, i < k
        for (int k = m + 1; k <= nmax; ++k) {
          std::vector<double> flat(k, std::pow(k, -1.0 / p));
          brute = std::max(brute, tail_q_norm(flat, m, q));
        }
        // random decreasing vectors on the lp simplex, with refinements
        std::vector<double> best_vec;
        for (int t = 0; t < 10000; ++t) {
          int len = 2 + static_cast<int>(rng.uniform_int(nmax - 1));
          std::vector<double> a(len);
          for (double& x : a) x = rng.uniform01() + 1e-9;
          std::sort(a.rbegin(), a.rend());
          double mass = 0.0;
          for (double x : a) mass += std::pow(x, p);
          double scale = std::pow(mass, -1.0 / p);
          for (double& x : a) x *= scale;
          double val = tail_q_norm(a, m, q);
          if (val > brute) {
            brute = val;
            best_vec = a;
          }
        }
        if (brute > bound + 1e-9) {
          res.details = fmt("p=%g q=%s m=%d: brute force %.9f exceeds bound "
                            "%.9f", p, q.str().c_str(), m, brute, bound);
          return res;
        }
        if (p == 1.0 && !q.is_inf() && q.value() == 2.0 && m == 1) {
          if (std::abs(bound - 0.5) > 1e-12 || brute < 0.5 - 1e-6) {
            res.details = fmt("p=1 q=2 m=1: bound %.12f, brute %.12f "
                              "(expected attainment at 1/2)", bound, brute);
            return res;
          }
        }
      }
    }
  }
  res.pass = true;
  res.details = "grid p x q x m clean; 1/2 attained at (1,2,1)";
  return res;
}

// ---------------------------------------------------------------------------
// 5. top-m thinning error against the closed-form bound
// ---------------------------------------------------------------------------

CriterionResult criterion5(std::uint64_t seed) {
  CriterionResult res{5, "top-m thinning error within C v(r)^{1-1/q} / "
                         "m^{1/p-1/q}", false, "", 0.0, {}};
  const int trials = 100;
  std::vector<std::string> fails(trials);
  std::vector<std::string> dumps(trials);
  detail::Rng master(seed ^ 0x5555);
  std::vector<std::uint64_t> salts(trials);
  for (auto& s : salts) s = master.raw();

  detail::parallel_for(trials, [&](int i) {
    detail::Rng rng(salts[i]);
    const int r = 1 + static_cast<int>(rng.uniform_int(3));
    const int n = 40 + static_cast<int>(rng.uniform_int(121));
    // thin rows, unconstrained columns
    IndexedMatrix a = zoo::random_thin_sparse(make_z(n), r, n, 0.7,
                                              rng.raw(), false);
    for (int m : {1, 2, 4, 8}) {
      auto thin = top_m_thinning(a, m, 1.0, Exponent(2.0));
      double bound2 = thin.bound;
      double boundinf = sequence_tail_bound(1.0, Exponent::inf(), m) *
                        thin.v_of_r;
      std::string bad;
      if (thin.measured_2 > bound2 * (1.0 + 1e-9))
        bad = fmt("trial %d m=%d: l2 error %.6g > bound %.6g", i, m,
                  thin.measured_2, bound2);
      else if (thin.measured_inf > boundinf * (1.0 + 1e-9))
        bad = fmt("trial %d m=%d: linf error %.6g > bound %.6g", i, m,
                  thin.measured_inf, boundinf);
      if (!bad.empty()) {
        fails[i] = bad;
        dumps[i] = "{\"criterion\":5,\"trial\":" + std::to_string(i) +
                   ",\"matrix\":" + io::matrix_to_json(a) + "}";
        return;
      }
    }
  });
  int bad = 0;
  for (int i = 0; i < trials; ++i)
    if (!fails[i].empty()) {
      ++bad;
      if (res.details.empty()) {
        res.details = fails[i];
        if (!dumps[i].empty()) res.counterexample = dumps[i];
      }
    }
  res.pass = bad == 0;
  if (res.pass)
    res.details = fmt("%d thin matrices, m in {1,2,4,8}, q in {2,inf}",
                      trials);
  return res;
}

// ---------------------------------------------------------------------------
// 6. propagation with the interval constants at window 12
// ---------------------------------------------------------------------------

CriterionResult criterion6(std::uint64_t seed) {
  CriterionResult res{6, "propagation: lambda_2 >= (lambda_p - tol)^2 / "
                         "(162 r^3 |A|)", false, "", 0.0, {}};
  const int trials = 100;
  const int n = 12;
  std::vector<std::string> fails(trials);
  std::vector<std::string> dumps(trials);
  detail::Rng master(seed ^ 0x6666);
  std::vector<std::uint64_t> salts(trials);
  for (auto& s : salts) s = master.raw();

  detail::parallel_for(trials, [&](int i) {
    detail::Rng rng(salts[i]);
    const int r = 1 + static_cast<int>(rng.uniform_int(3));
    IndexedMatrix a = zoo::random_thin_sparse(make_z(n), r, 2 * r + 1, 0.85,
                                              rng.raw(), true);
    double lambda2 = lambda_exact_2(a).value;
    // calibration: the optimizer without its exact start must agree at p=2
    OptimizerOptions opt_nostart;
    opt_nostart.use_exact_p2_start = false;
    double opt2 =
        lambda_estimate(a, Exponent(2.0), Budget{40, 400}, rng.raw(),
                        opt_nostart)
            .value;
    if (std::abs(opt2 - lambda2) > 1e-6) {
      fails[i] = fmt("trial %d: optimizer %.9g vs sigma_min %.9g "
                     "disagree beyond 1e-6", i, opt2, lambda2);
      dumps[i] = "{\"criterion\":6,\"trial\":" + std::to_string(i) +
                 ",\"matrix\":" + io::matrix_to_json(a) + "}";
      return;
    }
    const double denom =
        162.0 * std::pow(std::max(1.0, a.stats().thickness), 3.0) *
        a.stats().sup_norm;
    std::vector<std::pair<Exponent, double>> lam;
    lam.emplace_back(Exponent(1.0), lambda_exact_small(a, Exponent(1.0)).value);
    lam.emplace_back(Exponent::inf(),
                     lambda_exact_small(a, Exponent::inf()).value);
    lam.emplace_back(Exponent(2.0), lambda2);
    for (double pv : {4.0 / 3.0, 3.0, 6.0})
      lam.emplace_back(Exponent(pv),
                       lambda_estimate(a, Exponent(pv), Budget{40, 400},
                                       rng.raw())
                           .value);
    for (auto& [p, lhat] : lam) {
      double num = std::max(0.0, lhat - 1e-6);
      double rhs = denom > 0.0 ? num * num / denom : 0.0;
      if (lambda2 < rhs) {
        fails[i] = fmt("trial %d p=%s: lambda_2 %.9g < rhs %.9g "
                       "(lambda_p %.9g, denom %.6g)", i, p.str().c_str(),
                       lambda2, rhs, lhat, denom);
        dumps[i] = "{\"criterion\":6,\"trial\":" + std::to_string(i) +
                   ",\"matrix\":" + io::matrix_to_json(a) + "}";
        return;
      }
    }
  });
  int bad = 0;
  for (int i = 0; i < trials; ++i)
    if (!fails[i].empty()) {
      ++bad;
      if (res.details.empty()) {
        res.details = fails[i];
        if (!dumps[i].empty()) res.counterexample = dumps[i];
      }
    }
  res.pass = bad == 0;
  if (res.pass)
    res.details = fmt("%d window-12 matrices; calibration and bound hold "
                      "over the default grid", trials);
  return res;
}

// ---------------------------------------------------------------------------
// 7. Gram identity, self-adjoint inverse norm, left-inverse residual
// ---------------------------------------------------------------------------

CriterionResult criterion7(std::uint64_t seed) {
  CriterionResult res{7, "inverse identities: lambda_2(A*A)=lambda_2(A)^2, "
                         "|A^-1|_2 sigma_min = 1, |BA-I| <= 1e-8", false, "",
                      0.0, {}};
  detail::Rng rng(seed ^ 0x7777);
  // (i) Gram identity on rectangular random matrices
  for (int i = 0; i < 100; ++i) {
    std::vector<Entry> e;
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 12; ++x)
        e.push_back({y, x, rng.uniform(-1.0, 1.0)});
    IndexedMatrix a =
        IndexedMatrix::from_entries(make_z(12), 20, false, std::move(e));
    auto gc = gram_lambda_identity_check(a);
    if (gc.gap > 1e-9) {
      res.details = fmt("gram identity trial %d: relative gap %.3g", i,
                        gc.gap);
      return res;
    }
  }
  // (ii) self-adjoint positive definite: |A^{-1}|_2 * sigma_min(A) = 1
  for (int i = 0; i < 50; ++i) {
    Eigen::MatrixXd r(10, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) r(y, x) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd spd =
        r.transpose() * r + 0.5 * Eigen::MatrixXd::Identity(10, 10);
    std::vector<Entry> e;
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) e.push_back({y, x, spd(y, x)});
    IndexedMatrix a =
        IndexedMatrix::from_entries(make_z(10), 10, true, std::move(e));
    auto chk = selfadjoint_inverse_norm_check(a, Exponent(2.0), rng.raw());
    double smin = lambda_exact_2(a).value;
    if (std::abs(chk.lhs * smin - 1.0) > 1e-9) {
      res.details = fmt("spd trial %d: |A^-1|_2 sigma_min = %.12f", i,
                        chk.lhs * smin);
      return res;
    }
    if (chk.gap > 1e-9) {
      res.details = fmt("spd trial %d: inverse norm vs 1/lambda gap %.3g", i,
                        chk.gap);
      return res;
    }
  }
  // (iii) left inverse at window 300 whenever sigma_min >= 0.5
  int qualified = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 300;
    std::vector<Entry> e;
    for (int y = 0; y < n; ++y) {
      e.push_back({y, y, 3.0 + rng.uniform(-0.5, 0.5)});
      for (int x = std::max(0, y - 2); x <= std::min(n - 1, y + 2); ++x)
        if (x != y) e.push_back({y, x, rng.uniform(-1.0, 1.0)});
    }
    IndexedMatrix a =
        IndexedMatrix::from_entries(make_z(n), n, true, std::move(e));
    double smin = lambda_exact_2(a).value;
    if (smin < 0.5) continue;
    ++qualified;
    auto inv = build_left_inverse(a);
    if (inv.diagnostics.ba_minus_i_max > 1e-8) {
      res.details = fmt("left inverse trial %d: |BA - I|_max %.3g", i,
                        inv.diagnostics.ba_minus_i_max);
      return res;
    }
  }
  if (qualified == 0) {
    res.details = "no window-300 instance reached sigma_min >= 0.5";
    return res;
  }
  res.pass = true;
  res.details = fmt("gram x100, spd x50, left-inverse x%d qualified",
                    qualified);
  return res;
}

// ---------------------------------------------------------------------------
// 8. pipeline trichotomy on the elliptic, diffusion and staircase examples
// ---------------------------------------------------------------------------

IndexedMatrix elliptic_operator(int n) {
  std::vector<Entry> e;
  for (int x = 0; x < n; ++x) {
    e.push_back({x, x, 1.5});
    if (x > 0) e.push_back({x, x - 1, -0.5});
    if (x + 1 < n) e.push_back({x, x + 1, -0.5});
  }
  return IndexedMatrix::from_entries(make_z(n), n, true, std::move(e));
}

double path_lambda2_oracle(int n) { return 1.0 - std::cos(M_PI / (n + 1)); }

CriterionResult criterion8(std::uint64_t seed) {
  CriterionResult res{8, "pipeline trichotomy: elliptic stable, diffusion "
                         "degenerate, staircase endpoints", false, "", 0.0,
                      {}};
  auto grid = default_p_grid();
  PipelineOptions opts;
  opts.seed = seed ^ 0x8888;
  opts.budget = Budget{16, 250};
  Weight w = Weight::polynomial(1.0);

  // (a) uniformly elliptic: bounded below at every window, B norms stable
  {
    PipelineReport rep = stability_pipeline(elliptic_operator(400), w, grid,
                                            opts);
    if (rep.verdict != Verdict::uniformly_bounded_below) {
      res.details = "elliptic: verdict not uniformly_bounded_below";
      return res;
    }
    for (const auto& row : rep.rows)
      if (row.verdict != Verdict::uniformly_bounded_below) {
        res.details = fmt("elliptic window %d: verdict degenerate",
                          row.window);
        return res;
      }
    auto stable = [&](auto get, const char* what) {
      double lo = 1e300, hi = 0.0;
      for (const auto& row : rep.rows) {
        auto v = get(row);
        if (!v) continue;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
      if (hi > 2.0 * lo) {
        res.details = fmt("elliptic: %s varies by %.3f > 2 across windows",
                          what, hi / lo);
        return false;
      }
      return true;
    };
    for (Exponent p : {Exponent(1.0), Exponent(2.0), Exponent::inf()}) {
      if (!stable(
              [&](const PipelineRow& r) {
                return (r.p == p) ? r.norm_B_p : std::optional<double>{};
              },
              ("norm_B_" + p.str()).c_str()))
        return res;
    }
    if (!stable([](const PipelineRow& r) { return r.schur_B; }, "schur_B"))
      return res;
    if (!stable([](const PipelineRow& r) { return r.weighted_schur_B; },
                "weighted_schur_B"))
      return res;
  }
  // (b) diffusion: exact window spectrum and a degenerate verdict
  {
    PipelineReport rep =
        stability_pipeline(zoo::random_walk_operator(400), w, grid, opts);
    for (std::size_t i = 0; i < rep.windows.size(); ++i) {
      double oracle = path_lambda2_oracle(rep.windows[i]);
      if (std::abs(rep.lambda2_by_window[i] - oracle) > 1e-9) {
        res.details = fmt("diffusion window %d: lambda_2 %.12g vs oracle "
                          "%.12g", rep.windows[i], rep.lambda2_by_window[i],
                          oracle);
        return res;
      }
    }
    if (rep.verdict != Verdict::degenerate) {
      res.details = "diffusion: verdict not degenerate";
      return res;
    }
  }
  // (c) staircase endpoints
  {
    IndexedMatrix s = zoo::staircase_matrix(1.0, 16);
    double l1 =
        lambda_estimate(s, Exponent(1.0), Budget{24, 300}, seed ^ 0x8c).value;
    double linf =
        lambda_estimate(s, Exponent::inf(), Budget{24, 300}, seed ^ 0x8d)
            .value;
    if (std::abs(l1 - 1.0) > 1e-12) {
      res.details = fmt("staircase: lambda_1 = %.15f != 1", l1);
      return res;
    }
    if (!(linf <= 1.0 / 16.0)) {
      res.details = fmt("staircase: lambda_inf = %.15f > 1/16", linf);
      return res;
    }
  }
  res.pass = true;
  res.details = "elliptic stable within factor 2; diffusion matches the path "
                "spectrum and degenerates; staircase endpoints exact";
  return res;
}

// ---------------------------------------------------------------------------
// 9. decay fitting against tail-sum oracles
// ---------------------------------------------------------------------------

CriterionResult criterion9(std::uint64_t seed) {
  CriterionResult res{9, "decay fitting: fitted t near beta-1, exponential "
                         "flagged super-polynomial", false, "", 0.0, {}};
  std::vector<double> radii{16, 32, 64, 128, 256};
  for (double beta : {2.0, 3.0}) {
    IndexedMatrix a =
        zoo::polynomial_decay_matrix(make_z(2000), beta, seed ^ 0x9999);
    DecayProfile prof = decay_profile(a, radii);
    if (std::abs(prof.fitted_t - (beta - 1.0)) > 0.15) {
      res.details = fmt("beta=%g: fitted t %.4f not within 0.15 of %g", beta,
                        prof.fitted_t, beta - 1.0);
      return res;
    }
    if (prof.decay_class != DecayClass::polynomial) {
      res.details = fmt("beta=%g: classified %s", beta,
                        decay_class_name(prof.decay_class).c_str());
      return res;
    }
  }
  {
    IndexedMatrix a =
        zoo::exponential_decay_matrix(make_z(600), seed ^ 0x99AA);
    std::vector<double> r2{8, 16, 32, 64, 128};
    DecayProfile prof = decay_profile(a, r2);
    if (prof.decay_class != DecayClass::super_polynomial) {
      res.details = fmt("exponential profile classified %s (fitted t %.3f)",
                        decay_class_name(prof.decay_class).c_str(),
                        prof.fitted_t);
      return res;
    }
  }
  res.pass = true;
  res.details = "beta in {2,3} fitted within 0.15; exponential flagged";
  return res;
}

// ---------------------------------------------------------------------------
// 10. documented discrepancy of the dilation example
// ---------------------------------------------------------------------------

CriterionResult criterion10(std::uint64_t) {
  CriterionResult res{10, "dilation: |(I-D*)phi_n|_1 = 1/2 for even n, "
                          "flagged against the stated limit", false, "", 0.0,
                      {}};
  IndexedMatrix a = zoo::dilation_matrix(1024, 1.0);
  IndexedMatrix at = adjoint(a);
  std::ostringstream curve;
  for (int n = 4; n <= 1024; n *= 2) {
    auto phi = zoo::dilation_phi(a.rows(), n);
    double v = lp_norm(lpstab::apply(at, phi), Exponent(1.0));
    curve << "n=" << n << ":" << io::format_double(v) << " ";
    if (std::abs(v - 0.5) > 1e-12) {
      res.details = fmt("n=%d: measured %.15f != 1/2", n, v);
      return res;
    }
  }
  for (int n : {6, 10, 50, 100, 342, 1000}) {
    auto phi = zoo::dilation_phi(a.rows(), n);
    double v = lp_norm(lpstab::apply(at, phi), Exponent(1.0));
    if (std::abs(v - 0.5) > 1e-12) {
      res.details = fmt("n=%d: measured %.15f != 1/2", n, v);
      return res;
    }
  }
  res.pass = true;
  res.details =
      "curve " + curve.str() +
      "| open question: the measured value stays at 1/2 for even n and does "
      "not tend to 0; recorded as a documented discrepancy, not asserted";
  return res;
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  auto t0 = Clock::now();
  CriterionResult res;
  switch (id) {
    case 1: res = criterion1(seed); break;
    case 2: res = criterion2(seed); break;
    case 3: res = criterion3(seed); break;
    case 4: res = criterion4(seed); break;
    case 5: res = criterion5(seed); break;
    case 6: res = criterion6(seed); break;
    case 7: res = criterion7(seed); break;
    case 8: res = criterion8(seed); break;
    case 9: res = criterion9(seed); break;
    case 10: res = criterion10(seed); break;
    default:
      throw ParameterError("unknown criterion id " + std::to_string(id));
  }
  res.seconds =
      std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

std::vector<std::string> suite_names() {
  return {"structure", "localization", "sequences", "propagation",
          "inverse", "zoo", "all"};
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "structure") return {1, 2};
  if (suite == "localization") return {3};
  if (suite == "sequences") return {4, 5};
  if (suite == "propagation") return {6};
  if (suite == "inverse") return {7, 8, 9};
  if (suite == "zoo") return {10};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw ParameterError("unknown suite '" + suite + "'");
}

std::vector<CriterionResult> run_suite(const std::string& suite,
                                       std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) out.push_back(run_criterion(id, seed));
  return out;
}

}  // namespace verify
}  // namespace lpstab
