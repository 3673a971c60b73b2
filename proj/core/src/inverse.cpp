#include "lpstab/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpstab/errors.hpp"
#include "dense.hpp"
#include "detail.hpp"

namespace lpstab {

std::string decay_class_name(DecayClass c) {
  switch (c) {
    case DecayClass::banded: return "banded";
    case DecayClass::super_polynomial: return "super_polynomial";
    case DecayClass::polynomial: return "polynomial";
    case DecayClass::sub_polynomial: return "sub_polynomial";
  }
  return "?";
}

IndexedMatrix band_truncate(const IndexedMatrix& a, double r) {
  if (!a.rows_are_cols())
    throw StructureError("band_truncate requires Y = X");
  std::vector<Entry> kept;
  for (const Entry& e : a.entries())
    if (a.col_space().distance(e.row, e.col) <= r) kept.push_back(e);
  return IndexedMatrix::from_entries(a.col_space_ptr(), a.rows(), true,
                                     std::move(kept));
}

namespace {

struct LogFit {
  double slope = 0.0;
  double residual = 0.0;
  int points = 0;
};

LogFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LogFit f;
  f.points = static_cast<int>(xs.size());
  if (f.points < 2) return f;
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / f.points;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / f.points;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double rss = 0.0;
  for (int i = 0; i < f.points; ++i) {
    double pred = my + f.slope * (xs[i] - mx);
    rss += (ys[i] - pred) * (ys[i] - pred);
  }
  f.residual = std::sqrt(rss / f.points);
  return f;
}

DecayProfile classify_decay(std::vector<double> radii,
                            std::vector<double> errors) {
  DecayProfile prof;
  prof.radii = std::move(radii);
  prof.errors = std::move(errors);
  std::vector<double> lr, le, r_lin;
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    if (prof.errors[i] <= 0.0) continue;
    lr.push_back(std::log(prof.radii[i]));
    le.push_back(std::log(prof.errors[i]));
    r_lin.push_back(prof.radii[i]);
  }
  if (lr.size() < 2) {
    prof.fitted_t = std::numeric_limits<double>::infinity();
    prof.fit_residual = 0.0;
    prof.decay_class = DecayClass::banded;
    return prof;
  }
  LogFit poly = fit_line(lr, le);      // log err vs log r
  LogFit expo = fit_line(r_lin, le);   // log err vs r
  prof.fitted_t = -poly.slope;
  prof.fit_residual = poly.residual;
  if (expo.residual < 0.7 * poly.residual && expo.slope < 0.0)
    prof.decay_class = DecayClass::super_polynomial;
  else if (prof.fitted_t < 0.2)
    prof.decay_class = DecayClass::sub_polynomial;
  else
    prof.decay_class = DecayClass::polynomial;
  return prof;
}

}  // namespace

DecayProfile decay_profile(const IndexedMatrix& a,
                           std::span<const double> radii) {
  if (radii.size() < 3)
    throw ParameterError("decay_profile: need at least 3 radii");
  std::vector<double> rs(radii.begin(), radii.end());
  if (!std::is_sorted(rs.begin(), rs.end()))
    throw ParameterError("decay_profile: radii must be increasing");
  std::vector<double> errs;
  for (double r : rs) {
    std::vector<Entry> tail;
    for (const Entry& e : a.entries())
      if (a.col_space().distance(e.row, e.col) > r) tail.push_back(e);
    IndexedMatrix t = IndexedMatrix::from_entries(
        a.col_space_ptr(), a.rows(), a.rows_are_cols(), std::move(tail));
    errs.push_back(schur_norm(t));
  }
  return classify_decay(std::move(rs), std::move(errs));
}

LeftInverseResult build_left_inverse(const IndexedMatrix& a, double rel_tol) {
  const int m = a.rows(), n = a.cols();
  if (m > 3000 || n > 3000)
    throw CapacityError("build_left_inverse: window exceeds dense capacity");
  if (n == 0 || a.is_zero())
    throw NotBoundedBelowError("build_left_inverse: zero matrix", 0.0);
  Eigen::MatrixXd d = detail::to_dense(a);
  Eigen::VectorXd sv = detail::singular_values(d);
  double smax = sv(0), smin = (m >= n) ? sv(sv.size() - 1) : 0.0;
  if (!(smin > rel_tol * smax))
    throw NotBoundedBelowError(
        "build_left_inverse: sigma_min below tolerance", smin);

  Eigen::MatrixXd g = d.transpose() * d;
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw NotBoundedBelowError(
        "build_left_inverse: normal equations not positive definite", smin);
  Eigen::MatrixXd at = d.transpose();
  Eigen::MatrixXd z = llt.solve(at);
  z += llt.solve(at - g * z);  // one refinement step

  std::vector<Entry> be;
  be.reserve(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (z(i, j) != 0.0) be.push_back({i, j, z(i, j)});
  LeftInverseResult res{
      a.rows_are_cols()
          ? IndexedMatrix::from_entries(a.col_space_ptr(), n, true,
                                        std::move(be))
          : IndexedMatrix::from_entries(
                std::make_shared<const MetricSpace>(MetricSpace::discrete(m)),
                n, false, std::move(be)),
      {}};

  LeftInverseDiagnostics& diag = res.diagnostics;
  diag.sigma_min = smin;
  diag.sigma_max = smax;
  diag.ba_minus_i_max =
      (z * d - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  auto gb = check_gram_banded(a);
  diag.gram_propagation = gb.propagation;
  diag.gram_limit = gb.limit;

  if (a.rows_are_cols()) {
    // envelope of |b_{x,y}| by distance
    int diam = static_cast<int>(a.col_space().diameter());
    std::vector<double> env(diam + 1, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        int k = static_cast<int>(a.col_space().distance(i, j));
        env[k] = std::max(env[k], std::abs(z(i, j)));
      }
    std::vector<double> ks, es;
    for (int k = 1; k <= diam; ++k) {
      ks.push_back(k);
      es.push_back(env[k]);
    }
    if (ks.size() >= 3) diag.b_offband = classify_decay(ks, es);
  }
  return res;
}

InverseNormCheck selfadjoint_inverse_norm_check(const IndexedMatrix& a,
                                                Exponent p,
                                                std::uint64_t seed) {
  if (!a.rows_are_cols())
    throw StructureError("selfadjoint_inverse_norm_check requires Y = X");
  const int n = a.cols();
  if (n > 3000)
    throw CapacityError("selfadjoint_inverse_norm_check: window too large");
  Eigen::MatrixXd d = detail::to_dense(a);
  if ((d - d.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, a.stats().sup_norm))
    throw StructureError("selfadjoint_inverse_norm_check: not symmetric");
  Eigen::VectorXd sv = detail::singular_values(d);
  double smin = sv(sv.size() - 1);
  if (!(smin > 1e-9 * sv(0)))
    throw NotBoundedBelowError("selfadjoint_inverse_norm_check: singular",
                               smin);
  Eigen::MatrixXd inv = d.inverse();
  std::vector<Entry> ie;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (inv(i, j) != 0.0) ie.push_back({i, j, inv(i, j)});
  IndexedMatrix invm = IndexedMatrix::from_entries(a.col_space_ptr(), n, true,
                                                   std::move(ie));
  InverseNormCheck res;
  res.lhs = op_norm(invm, p).value;
  LambdaEstimate lam;
  if (!p.is_inf() && p.value() == 2.0)
    lam = lambda_exact_2(a);
  else if ((p.is_inf() || p.value() == 1.0) && n <= 16)
    lam = lambda_exact_small(a, p);
  else
    lam = lambda_estimate(a, p, Budget{32, 600}, seed);
  res.rhs = lam.value > 0.0 ? 1.0 / lam.value
                            : std::numeric_limits<double>::infinity();
  res.gap = std::abs(res.lhs - res.rhs) /
            std::max({std::abs(res.lhs), std::abs(res.rhs), 1e-300});
  return res;
}

GramLambdaCheck gram_lambda_identity_check(const IndexedMatrix& a) {
  GramLambdaCheck res;
  IndexedMatrix g = gram(a);
  res.lambda2_gram = lambda_exact_2(g).value;
  double l2 = lambda_exact_2(a).value;
  res.lambda2_sq = l2 * l2;
  res.gap = std::abs(res.lambda2_gram - res.lambda2_sq) /
            std::max({res.lambda2_gram, res.lambda2_sq, 1e-300});
  return res;
}

namespace {

IndexedMatrix restrict_window(const IndexedMatrix& a, int m) {
  auto sub = std::make_shared<const MetricSpace>(MetricSpace::z_interval(m));
  std::vector<Entry> kept;
  for (const Entry& e : a.entries())
    if (e.row < m && e.col < m) kept.push_back(e);
  return IndexedMatrix::from_entries(sub, m, true, std::move(kept));
}

std::vector<double> default_radii(double diam) {
  std::vector<double> rs;
  for (double r = 2.0; r <= diam / 2.0; r *= 2.0) rs.push_back(r);
  return rs;
}

}  // namespace

PipelineReport stability_pipeline(const IndexedMatrix& a, const Weight& w,
                                  std::span<const Exponent> p_grid,
                                  const PipelineOptions& opts) {
  if (!a.rows_are_cols())
    throw StructureError("stability_pipeline requires Y = X");
  if (a.cols() > 3000)
    throw CapacityError("stability_pipeline: window exceeds the dense "
                        "capacity of the inverse stage");
  PipelineReport rep;
  const int n = a.cols();
  const bool sweep = opts.sweep_windows && n >= 16 &&
                     a.col_space().kind() == MetricSpace::Kind::ZInterval;
  if (sweep)
    rep.windows = {(n + 3) / 4, (n + 1) / 2, n};
  else
    rep.windows = {n};
  rep.notes =
      "windows restricted by index prefix (Dirichlet truncation); boundary "
      "rows perturb lambda estimates near the cut";

  detail::Rng rng(opts.seed);
  std::uint64_t report_seed = rng.raw();
  rep.stability = stability_report(a, p_grid, opts.budget, report_seed);

  auto radii = default_radii(a.col_space().diameter());
  if (radii.size() >= 3)
    rep.decay = decay_profile(a, radii);
  else {
    rep.decay.fitted_t = std::numeric_limits<double>::infinity();
    rep.decay.decay_class = DecayClass::banded;
  }

  for (int win : rep.windows) {
    IndexedMatrix sub = (win == n) ? a : restrict_window(a, win);
    LambdaEstimate l2 = lambda_exact_2(sub);
    rep.lambda2_by_window.push_back(l2.value);
    double smax = op_norm(sub, Exponent(2.0)).value;
    Verdict win_verdict = (l2.value > opts.not_bounded_rel_tol * smax &&
                           l2.value >= 1e-6 * smax)
                              ? Verdict::uniformly_bounded_below
                              : Verdict::degenerate;
    std::optional<LeftInverseResult> inv;
    if (win_verdict == Verdict::uniformly_bounded_below) {
      try {
        inv = build_left_inverse(sub, opts.not_bounded_rel_tol);
      } catch (const NotBoundedBelowError&) {
        win_verdict = Verdict::degenerate;
      }
    }
    for (Exponent p : p_grid) {
      PipelineRow row;
      row.window = win;
      row.p = p;
      if (!p.is_inf() && p.value() == 2.0)
        row.lambda_hat = l2.value;
      else
        row.lambda_hat =
            lambda_estimate(sub, p, opts.budget, rng.raw()).value;
      if (inv) {
        row.norm_B_p = op_norm(inv->B, p).value;
        row.schur_B = schur_norm(inv->B);
        row.weighted_schur_B = weighted_schur_norm(inv->B, w);
        if (inv->B.col_space().is_lattice()) row.cd_B = cd_norm(inv->B);
      }
      row.fitted_t = rep.decay.fitted_t;
      row.verdict = win_verdict;
      rep.rows.push_back(std::move(row));
    }
    if (win == n && inv) rep.inverse = std::move(inv);
  }

  // window trend of lambda_2: slope of -log lambda vs log window
  if (rep.windows.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.windows.size(); ++i) {
      if (rep.lambda2_by_window[i] <= 0.0) continue;
      lx.push_back(std::log(static_cast<double>(rep.windows[i])));
      ly.push_back(-std::log(rep.lambda2_by_window[i]));
    }
    if (lx.size() >= 2) {
      double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
      }
      rep.trend_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
    }
  }

  double full_l2 = rep.lambda2_by_window.back();
  double full_smax = op_norm(a, Exponent(2.0)).value;
  bool tiny = full_l2 < 1e-6 * full_smax;
  bool decaying = rep.windows.size() >= 2 &&
                  rep.trend_exponent >= opts.degenerate_trend_exponent;
  rep.verdict = (tiny || decaying || !rep.inverse)
                    ? Verdict::degenerate
                    : Verdict::uniformly_bounded_below;
  return rep;
}

}  // namespace lpstab
