#include "lpstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpstab/errors.hpp"
#include "dense.hpp"
#include "detail.hpp"

namespace lpstab {

std::string lambda_method_name(LambdaMethod m) {
  switch (m) {
    case LambdaMethod::exact_svd: return "exact_svd";
    case LambdaMethod::optimizer: return "optimizer";
    case LambdaMethod::localized_sweep: return "localized_sweep";
    case LambdaMethod::exact_small: return "exact_small";
  }
  return "?";
}

std::string verdict_name(Verdict v) {
  return v == Verdict::degenerate ? "degenerate" : "uniformly_bounded_below";
}

double rayleigh_ratio(const IndexedMatrix& a, std::span<const double> f,
                      Exponent p) {
  double fn = lp_norm(f, p);
  if (fn == 0.0) throw DegenerateInputError("rayleigh_ratio: zero vector");
  auto af = lpstab::apply(a, f);
  return lp_norm(af, p) / fn;
}

namespace {

double support_radius(const IndexedMatrix& a, std::span<const double> f) {
  std::vector<int> supp;
  for (int i = 0; i < static_cast<int>(f.size()); ++i)
    if (f[i] != 0.0) supp.push_back(i);
  if (supp.empty()) return 0.0;
  return a.col_space().enclosing_ball(supp).radius;
}

LambdaEstimate finish_estimate(const IndexedMatrix& a, Exponent p,
                               std::vector<double> witness,
                               LambdaMethod method, double tol,
                               std::uint64_t seed) {
  LambdaEstimate est;
  est.p = p;
  est.witness = std::move(witness);
  est.value = rayleigh_ratio(a, est.witness, p);
  est.method = method;
  est.tolerance = tol;
  est.seed = seed;
  est.witness_support_radius = support_radius(a, est.witness);
  return est;
}

}  // namespace

LambdaEstimate lambda_exact_2(const IndexedMatrix& a, int max_dense_dim) {
  const int m = a.rows(), n = a.cols();
  if (m > max_dense_dim || n > max_dense_dim)
    throw CapacityError("lambda_exact_2: window exceeds dense capacity");
  if (n == 0) throw DegenerateInputError("lambda_exact_2: empty column set");
  if (a.is_zero())
    return finish_estimate(a, Exponent(2.0),
                           std::vector<double>(n, n ? 1.0 : 0.0),
                           LambdaMethod::exact_svd, 0.0, 0);
  Eigen::MatrixXd d = detail::to_dense(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  Eigen::BDCSVD<Eigen::MatrixXd> bdc;
  Eigen::MatrixXd V;
  Eigen::VectorXd sv;
  if (std::max(m, n) <= 64) {
    svd.compute(d, Eigen::ComputeFullV);
    V = svd.matrixV();
    sv = svd.singularValues();
  } else {
    bdc.compute(d, Eigen::ComputeFullV);
    V = bdc.matrixV();
    sv = bdc.singularValues();
  }
  // fewer rows than columns: a kernel vector realizes ratio zero
  std::vector<double> witness(n);
  int pick = std::min<int>(static_cast<int>(sv.size()), n) - 1;
  if (n > m) pick = n - 1;  // trailing right vectors are null directions
  for (int i = 0; i < n; ++i) witness[i] = V(i, pick);
  return finish_estimate(a, Exponent(2.0), std::move(witness),
                         LambdaMethod::exact_svd, 1e-12, 0);
}

namespace {

/// One subgradient of f -> ||Af||_p / ||f||_p at a point with ||f||_p = 1.
void ratio_subgradient(const IndexedMatrix& a, Exponent p,
                       const std::vector<double>& f,
                       const std::vector<double>& af, double ratio,
                       std::vector<double>& grad) {
  const int n = a.cols();
  grad.assign(n, 0.0);
  double afn = lp_norm(af, p);
  if (p.is_inf()) {
    int ystar = 0;
    double best = -1.0;
    for (int y = 0; y < static_cast<int>(af.size()); ++y)
      if (std::abs(af[y]) > best) { best = std::abs(af[y]); ystar = y; }
    double sgn = af[ystar] >= 0.0 ? 1.0 : -1.0;
    for (const Entry& e : a.row(ystar)) grad[e.col] += sgn * e.value;
    int jstar = 0;
    best = -1.0;
    for (int j = 0; j < n; ++j)
      if (std::abs(f[j]) > best) { best = std::abs(f[j]); jstar = j; }
    grad[jstar] -= ratio * (f[jstar] >= 0.0 ? 1.0 : -1.0);
    return;
  }
  const double pv = p.value();
  // d||g||_p = sign(g) |g/||g||_p|^{p-1}; at zero coordinates take 0
  // (the quasi-norm side blows up there for p < 1)
  auto pw = [pv](double t) {
    if (t == 0.0) return pv == 1.0 ? 1.0 : 0.0;
    return std::pow(t, pv - 1.0);
  };
  std::vector<double> u(af.size(), 0.0);
  if (afn > 0.0) {
    for (std::size_t y = 0; y < af.size(); ++y) {
      double t = std::abs(af[y]) / afn;
      u[y] = (af[y] >= 0.0 ? 1.0 : -1.0) * pw(t);
    }
  }
  for (const Entry& e : a.entries()) grad[e.col] += e.value * u[e.row];
  for (int j = 0; j < n; ++j) {
    double t = std::abs(f[j]);
    grad[j] -= ratio * (f[j] >= 0.0 ? 1.0 : -1.0) * pw(t);
  }
}

struct DescentOutcome {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> witness;
};

DescentOutcome descend(const IndexedMatrix& a, Exponent p,
                       std::vector<double> f, int iters) {
  DescentOutcome out;
  double fn = lp_norm(f, p);
  if (fn == 0.0) return out;
  for (double& x : f) x /= fn;
  std::vector<double> grad, af;
  af = lpstab::apply(a, f);
  out.value = lp_norm(af, p);
  out.witness = f;
  double step0 = 0.5;
  for (int t = 0; t < iters; ++t) {
    double ratio = lp_norm(af, p);
    ratio_subgradient(a, p, f, af, ratio, grad);
    double gn = lp_norm(grad, Exponent(2.0));
    if (gn < 1e-300) break;
    double step = step0 / (gn * std::sqrt(t + 1.0));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= step * grad[i];
    double nn = lp_norm(f, p);
    if (nn == 0.0) break;
    for (double& x : f) x /= nn;
    af = lpstab::apply(a, f);
    double val = lp_norm(af, p);
    if (val < out.value) {
      out.value = val;
      out.witness = f;
    }
  }
  return out;
}

/// Geometric-step local refinement from an incumbent.
DescentOutcome polish_subgradient(const IndexedMatrix& a, Exponent p,
                                  DescentOutcome best, int iters) {
  std::vector<double> f = best.witness, grad, af = lpstab::apply(a, f);
  double step = 0.05;
  for (int t = 0; t < iters; ++t) {
    double ratio = lp_norm(af, p);
    ratio_subgradient(a, p, f, af, ratio, grad);
    double gn = lp_norm(grad, Exponent(2.0));
    if (gn < 1e-300) break;
    std::vector<double> cand = f;
    for (std::size_t i = 0; i < f.size(); ++i) cand[i] -= step / gn * grad[i];
    double nn = lp_norm(cand, p);
    if (nn == 0.0) break;
    for (double& x : cand) x /= nn;
    auto caf = lpstab::apply(a, cand);
    double val = lp_norm(caf, p);
    if (val < best.value) {
      best.value = val;
      best.witness = cand;
      f = std::move(cand);
      af = std::move(caf);
    } else {
      step *= 0.8;
      if (step < 1e-14) break;
    }
  }
  return best;
}

/// Inverse iteration on A*A drives the p=2 witness into the bottom singular
/// subspace; a dense factorization is affordable at desk scale.
DescentOutcome polish_p2(const IndexedMatrix& a, DescentOutcome best,
                         int max_dense_dim) {
  const int n = a.cols();
  if (n > max_dense_dim || a.rows() > max_dense_dim || a.is_zero())
    return best;
  Eigen::MatrixXd d = detail::to_dense(a);
  Eigen::MatrixXd g = d.transpose() * d;
  // tiny ridge keeps the factorization alive for singular A
  double ridge = 1e-14 * std::max(1.0, g.trace() / std::max(1, n));
  Eigen::LDLT<Eigen::MatrixXd> ldlt(
      g + ridge * Eigen::MatrixXd::Identity(n, n));
  if (ldlt.info() != Eigen::Success) return best;
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f(i) = best.witness[i];
  for (int it = 0; it < 40; ++it) {
    f = ldlt.solve(f);
    double nn = f.norm();
    if (!(nn > 0.0) || !std::isfinite(nn)) return best;
    f /= nn;
  }
  std::vector<double> w(f.data(), f.data() + n);
  double val = rayleigh_ratio(a, w, Exponent(2.0));
  if (val < best.value) {
    best.value = val;
    best.witness = std::move(w);
  }
  return best;
}

}  // namespace

LambdaEstimate lambda_estimate(const IndexedMatrix& a, Exponent p,
                               Budget budget, std::uint64_t seed,
                               const OptimizerOptions& opts) {
  if (!p.valid()) throw ParameterError("lambda_estimate: p must be positive");
  const int n = a.cols();
  if (a.is_zero()) {
    std::vector<double> w(n, 0.0);
    if (n > 0) w[0] = 1.0;
    return finish_estimate(a, p, std::move(w), LambdaMethod::optimizer, 0.0,
                           seed);
  }
  detail::Rng rng(seed);

  std::vector<std::vector<double>> starts;
  std::vector<bool> localized_flag;
  auto add_start = [&](std::vector<double> v, bool localized = false) {
    starts.push_back(std::move(v));
    localized_flag.push_back(localized);
  };

  // cheapest witnesses first: the best single column
  {
    int best_j = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      bool any = false;
      for (std::int32_t i : a.column(x)) {
        any = true;
        double v = std::abs(a.entries()[i].value);
        s = p.is_inf() ? std::max(s, v) : s + std::pow(v, p.value());
      }
      double ratio = any ? (p.is_inf() ? s : std::pow(s, p.inv())) : 0.0;
      if (ratio < best_ratio) { best_ratio = ratio; best_j = x; }
    }
    std::vector<double> e(n, 0.0);
    e[best_j] = 1.0;
    add_start(std::move(e));
  }
  if (opts.use_exact_p2_start && n <= opts.max_dense_dim &&
      a.rows() <= opts.max_dense_dim) {
    try {
      add_start(lambda_exact_2(a, opts.max_dense_dim).witness);
    } catch (const Error&) {
    }
  }
  const int remaining = std::max(0, budget.starts -
                                         static_cast<int>(starts.size()));
  for (int s = 0; s < remaining; ++s) {
    std::vector<double> f(n, 0.0);
    if (s % 2 == 0) {
      for (double& x : f) x = rng.uniform(-1.0, 1.0);
    } else {
      int k = 1 + static_cast<int>(rng.uniform_int(std::min(n, 32)));
      for (int j = 0; j < k; ++j)
        f[rng.uniform_int(n)] = rng.uniform(-1.0, 1.0);
      if (lp_norm(f, p) == 0.0) f[rng.uniform_int(n)] = 1.0;
    }
    add_start(std::move(f));
  }

  std::vector<DescentOutcome> outcomes(starts.size());
  detail::parallel_for(static_cast<int>(starts.size()), [&](int i) {
    outcomes[i] = descend(a, p, starts[i], budget.iters);
  });

  int best_i = 0;
  for (int i = 1; i < static_cast<int>(outcomes.size()); ++i)
    if (outcomes[i].value < outcomes[best_i].value) best_i = i;
  DescentOutcome best = outcomes[best_i];
  bool from_localized = localized_flag[best_i];

  // localized candidates around the incumbent
  if (opts.use_localized_starts && (p.is_inf() || p.value() >= 1.0) &&
      a.col_space().kind() != MetricSpace::Kind::Discrete) {
    double r = a.stats().thickness;
    double diam = a.col_space().diameter();
    for (double L : {std::max(2.0 * r, 4.0), std::max(4.0 * r, diam / 8.0)}) {
      if (L < std::max(r, 1.0) || L > diam) continue;
      try {
        auto loc = localize(a, best.witness, L, p);
        auto out = descend(a, p, loc.h, budget.iters / 2);
        if (out.value < best.value) {
          best = std::move(out);
          from_localized = true;
        }
      } catch (const Error&) {
      }
    }
  }

  if (p.value() == 2.0 && !p.is_inf())
    best = polish_p2(a, std::move(best), opts.max_dense_dim);
  else
    best = polish_subgradient(a, p, std::move(best), 4 * budget.iters);

  return finish_estimate(a, p, std::move(best.witness),
                         from_localized ? LambdaMethod::localized_sweep
                                        : LambdaMethod::optimizer,
                         1e-6, seed);
}

LambdaEstimate lambda_exact_small(const IndexedMatrix& a, Exponent p,
                                  int max_dim) {
  if (!a.rows_are_cols())
    throw StructureError("lambda_exact_small requires Y = X");
  const int n = a.cols();
  if (n > max_dim)
    throw CapacityError("lambda_exact_small: window too large");
  if (p.value() == 2.0 && !p.is_inf()) return lambda_exact_2(a);
  if (!p.is_inf() && p.value() != 1.0)
    throw ParameterError("lambda_exact_small: p must be 1, 2 or inf");

  Eigen::MatrixXd d = detail::to_dense(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (smax == 0.0 || smin <= 1e-12 * smax) {
    // singular: the kernel vector drives every lambda_p to zero
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = svd.matrixV()(i, n - 1);
    auto est = finish_estimate(a, p, std::move(w), LambdaMethod::exact_small,
                               1e-12, 0);
    est.value = 0.0;
    return est;
  }
  Eigen::MatrixXd inv = d.inverse();
  Eigen::VectorXd wbest;
  double best = -1.0;
  if (p.is_inf()) {
    // corners of the unit cube: vertices of the preimage polytope
    Eigen::VectorXd sign(n);
    const std::uint64_t count = 1ull << (n - 1);  // -f gives the same ratio
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      sign(0) = 1.0;
      for (int i = 1; i < n; ++i)
        sign(i) = (mask >> (i - 1)) & 1 ? 1.0 : -1.0;
      Eigen::VectorXd w = inv * sign;
      double nrm = w.lpNorm<Eigen::Infinity>();
      if (nrm > best) { best = nrm; wbest = w; }
    }
  } else {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd w = inv.col(j);
      double nrm = w.lpNorm<1>();
      if (nrm > best) { best = nrm; wbest = w; }
    }
  }
  std::vector<double> w(wbest.data(), wbest.data() + n);
  return finish_estimate(a, p, std::move(w), LambdaMethod::exact_small, 1e-12,
                         0);
}

double PropagationConstants::preset_u(double t, double s, double d) {
  return std::min({0.5, t / 2.0, s * d});
}

PropagationConstants PropagationConstants::z_constants(
    const IndexedMatrix& a) {
  if (a.col_space().kind() != MetricSpace::Kind::ZInterval)
    throw StructureError("z_constants: column space is not an interval");
  PropagationConstants c;
  c.d = 1.0;
  c.r = std::max(1.0, a.stats().thickness);
  c.v = std::max(1, a.stats().sparseness);
  c.C1 = 3.0;
  c.C2 = 3.0 * c.r * a.stats().sup_norm;
  c.K = 18.0;
  return c;
}

PropagationConstants PropagationConstants::measured(const IndexedMatrix& a,
                                                    double covering_L) {
  PropagationConstants c;
  const MetricSpace& sp = a.col_space();
  BallCovering cov = covering(sp, covering_L, 6.0);
  c.d = sp.growth_d();
  c.r = std::max(1.0, a.stats().thickness);
  c.v = std::max(1, a.stats().sparseness);
  c.C1 = 2.0 * cov.num_colors;
  double n1 = op_norm(a, Exponent(1.0)).value;
  double ninf = op_norm(a, Exponent::inf()).value;
  c.C2 = std::max(n1, ninf);  // dominates |||A|||_{p->p} for every p
  c.K = 2.0 * c.C1 * sp.growth_K() * std::pow(2.0, c.d);
  return c;
}

double propagation_bound(double lambda_q, Exponent p, Exponent q,
                         const PropagationConstants& c,
                         PropagationVariant variant) {
  if (!p.valid() || !q.valid())
    throw ParameterError("propagation_bound: exponents must be positive");
  const double gap = c.d * std::abs(p.inv() - q.inv());
  if (gap >= 1.0)
    throw ParameterError(
        "propagation_bound: step too large, |d/p - d/q| must be < 1");
  if (variant == PropagationVariant::ThinOnly && !(p.inv() >= q.inv()))
    throw ParameterError("propagation_bound: thin-only variant needs p <= q");
  if (lambda_q <= 0.0) return 0.0;
  const double r = std::max(1.0, c.r);
  double denom = c.K * std::pow(r, gap);
  if (variant == PropagationVariant::TS)
    denom *= std::pow(std::max(1.0, c.v), std::abs(p.inv() - q.inv()));
  return std::pow(lambda_q / denom, 1.0 / (1.0 - gap));
}

std::vector<Exponent> default_p_grid() {
  return {Exponent(1.0), Exponent(4.0 / 3.0), Exponent(2.0), Exponent(3.0),
          Exponent(6.0), Exponent::inf()};
}

StabilityReport stability_report(const IndexedMatrix& a,
                                 std::span<const Exponent> p_grid,
                                 Budget budget, std::uint64_t seed,
                                 bool allow_sparse_grid,
                                 const OptimizerOptions& opts) {
  if (p_grid.empty()) throw ParameterError("stability_report: empty grid");
  if (!allow_sparse_grid) {
    bool has1 = false, has2 = false, hasinf = false;
    for (Exponent p : p_grid) {
      if (p.is_inf()) hasinf = true;
      else if (p.value() == 1.0) has1 = true;
      else if (p.value() == 2.0) has2 = true;
    }
    if (!(has1 && has2 && hasinf))
      throw ParameterError("stability_report: grid must include 1, 2 and inf");
  }
  StabilityReport rep;
  rep.seed = seed;
  rep.estimates.resize(p_grid.size());
  detail::Rng rng(seed);
  std::vector<std::uint64_t> salts(p_grid.size());
  for (auto& s : salts) s = rng.raw();
  const bool small_square = a.rows_are_cols() && a.cols() <= 16;
  detail::parallel_for(static_cast<int>(p_grid.size()), [&](int i) {
    Exponent p = p_grid[i];
    if (!p.is_inf() && p.value() == 2.0 && a.cols() <= opts.max_dense_dim &&
        a.rows() <= opts.max_dense_dim) {
      rep.estimates[i] = lambda_exact_2(a, opts.max_dense_dim);
    } else if (small_square && (p.is_inf() || p.value() == 1.0)) {
      rep.estimates[i] = lambda_exact_small(a, p);
    } else {
      rep.estimates[i] = lambda_estimate(a, p, budget, salts[i], opts);
    }
  });
  rep.sigma_max = op_norm(a, Exponent(2.0)).value;
  // extremes; ties resolved toward p = 2
  auto closer_to_2 = [](Exponent x, Exponent y) {
    return std::abs(x.inv() - 0.5) < std::abs(y.inv() - 0.5);
  };
  int im = 0, iM = 0;
  for (int i = 1; i < static_cast<int>(rep.estimates.size()); ++i) {
    double v = rep.estimates[i].value;
    if (v < rep.estimates[im].value ||
        (v == rep.estimates[im].value &&
         closer_to_2(p_grid[i], p_grid[im])))
      im = i;
    if (v > rep.estimates[iM].value ||
        (v == rep.estimates[iM].value &&
         closer_to_2(p_grid[i], p_grid[iM])))
      iM = i;
  }
  rep.lambda_small = rep.estimates[im].value;
  rep.Lambda_big = rep.estimates[iM].value;
  rep.p_m = p_grid[im];
  rep.p_M = p_grid[iM];
  bool all_tiny = true;
  for (const auto& e : rep.estimates)
    if (e.value > 0.0 && e.value >= 1e-6 * rep.sigma_max) all_tiny = false;
  rep.verdict =
      all_tiny ? Verdict::degenerate : Verdict::uniformly_bounded_below;
  return rep;
}

ChainResult chain_propagation(const StabilityReport& report,
                              const PropagationConstants& c,
                              const IndexedMatrix& a) {
  if (report.estimates.empty())
    throw ParameterError("chain_propagation: empty report");
  ChainResult res;
  const double xM = c.d * report.p_M.inv();
  const double xm = c.d * report.p_m.inv();
  const double total = std::abs(xm - xM);
  const int steps = std::max(1, static_cast<int>(std::ceil(total / 0.5 - 1e-12)));
  double k_const = 1.0, expo = 1.0;
  auto exp_of = [&](double x) {
    return x == 0.0 ? Exponent::inf() : Exponent(c.d / x);
  };
  for (int i = 0; i < steps; ++i) {
    double x_from = xM + (xm - xM) * i / steps;
    double x_to = xM + (xm - xM) * (i + 1) / steps;
    ChainStep st;
    st.from = exp_of(x_from);
    st.to = exp_of(x_to);
    st.gap = std::abs(x_to - x_from);
    double inv_gap = st.gap / std::max(c.d, 1e-300);
    st.factor = c.K * std::pow(std::max(1.0, c.v), inv_gap) *
                std::pow(std::max(1.0, c.r), st.gap);
    st.exponent = 1.0 / (1.0 - st.gap);
    k_const = std::pow(k_const / st.factor, st.exponent);
    expo *= st.exponent;
    res.steps.push_back(st);
  }
  res.k_constant = k_const;
  res.Lambda_exponent = expo;
  res.bound = k_const * std::pow(report.Lambda_big, expo);
  res.consistent = report.lambda_small >= res.bound - 1e-12;

  bool have_lambda2 = false;
  double lambda2 = 0.0;
  for (const auto& e : report.estimates)
    if (!e.p.is_inf() && e.p.value() == 2.0) {
      have_lambda2 = true;
      lambda2 = e.value;
    }
  if (a.col_space().kind() == MetricSpace::Kind::ZInterval &&
      a.rows_are_cols() && have_lambda2) {
    Zrem2Check z;
    double r = std::max(1.0, a.stats().thickness);
    z.denominator = 162.0 * r * r * r * a.stats().sup_norm;
    z.holds = true;
    for (const auto& e : report.estimates) {
      z.grid.push_back(e.p);
      z.lambda_hat.push_back(e.value);
      double num = std::max(0.0, e.value - z.tol);
      double rhs = z.denominator > 0.0 ? num * num / z.denominator : 0.0;
      z.rhs.push_back(rhs);
      if (lambda2 < rhs) z.holds = false;
    }
    res.zrem2 = std::move(z);
  }
  return res;
}

AlmostTsPreset almost_ts_preset(double lambda_p, double t, double s,
                                double d) {
  if (!(t > 0.0) || !(s > 0.0) || !(d > 0.0))
    throw ParameterError("almost_ts_preset: t, s, d must be positive");
  AlmostTsPreset pre;
  pre.u = PropagationConstants::preset_u(t, s, d);
  pre.L = lambda_p > 0.0 ? std::pow(lambda_p, -1.0 / pre.u) : 1.0;
  pre.L = std::max(1.0, pre.L);
  pre.r = std::sqrt(pre.L);
  pre.v = std::pow(pre.L, d);
  return pre;
}

}  // namespace lpstab
