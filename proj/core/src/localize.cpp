#include <algorithm>
#include <cmath>
#include <limits>

#include "lpstab/errors.hpp"
#include "lpstab/stability.hpp"
#include "detail.hpp"

namespace lpstab {

namespace {

/// Distance from x to the progression {x0 + k*stride} inside [0, n).
double progression_distance(int x, int x0, int stride, int n) {
  int k = (x - x0) / stride;
  double best = std::numeric_limits<double>::infinity();
  for (int kk = k - 1; kk <= k + 1; ++kk) {
    int c = x0 + kk * stride;
    if (c < 0 || c >= n) continue;
    best = std::min(best, static_cast<double>(std::abs(x - c)));
  }
  return best;
}

struct ClassChoice {
  std::vector<int> centers;
  std::vector<double> delta;  // cutoff values on all of X
  double capture = 0.0;       // ||Delta_P f||_p
  int label = 0;              // shift (interval route) or color
  double C1 = 0.0;
  double C2 = 0.0;
};

/// Interval route: arithmetic progressions {x0 + 6kL} over every shift x0,
/// keeping the one that captures the most of f under the cutoff.
ClassChoice choose_class_z(const IndexedMatrix& a, std::span<const double> f,
                           double L, Exponent p) {
  const int n = a.cols();
  const int stride = std::max(1, static_cast<int>(std::ceil(6.0 * L)));
  const double twoL = 2.0 * L;
  ClassChoice best;
  best.capture = -1.0;
  std::vector<double> delta(n);
  for (int x0 = 0; x0 < std::min(stride, n); ++x0) {
    for (int x = 0; x < n; ++x) {
      double d = progression_distance(x, x0, stride, n);
      delta[x] = std::max(0.0, 1.0 - d / twoL);
    }
    std::vector<double> g(n);
    for (int x = 0; x < n; ++x) g[x] = delta[x] * f[x];
    double cap = lp_norm(g, p);
    if (cap > best.capture) {
      best.capture = cap;
      best.delta = delta;
      best.label = x0;
    }
  }
  for (int c = best.label; c < n; c += stride) best.centers.push_back(c);
  double r = a.stats().thickness;
  best.C1 = 3.0;
  best.C2 = 3.0 * r * a.stats().sup_norm;
  return best;
}

ClassChoice choose_class_covering(const IndexedMatrix& a,
                                  std::span<const double> f, double L,
                                  Exponent p) {
  const MetricSpace& sp = a.col_space();
  BallCovering cov = covering(sp, L, 6.0);
  ColorClassSelection sel = select_color_class(f, cov, sp, p);
  CutoffProfile prof = cutoff(sel.centers, L, sp);
  ClassChoice ch;
  ch.centers = sel.centers;
  ch.delta = prof.values;
  ch.label = sel.color;
  std::vector<double> g(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) g[x] = ch.delta[x] * f[x];
  ch.capture = lp_norm(g, p);
  ch.C1 = 2.0 * cov.num_colors;
  // |||A|||_{p->p} interpolated from the exact endpoint norms
  double n1 = op_norm(a, Exponent(1.0)).value;
  double ninf = op_norm(a, Exponent::inf()).value;
  ch.C2 = p.is_inf() ? ninf
                     : std::pow(n1, p.inv()) * std::pow(ninf, 1.0 - p.inv());
  return ch;
}

}  // namespace

LocalizeResult localize(const IndexedMatrix& a, std::span<const double> f,
                        double L, Exponent p) {
  if (static_cast<int>(f.size()) != a.cols())
    throw ShapeError("localize: f has wrong length");
  if (!(p.is_inf() || p.value() >= 1.0))
    throw ParameterError("localize: p must lie in [1, inf]");
  const double r = a.stats().thickness;
  if (!(L > 0.0) || L < r)
    throw ParameterError("localize: need L >= thickness(A)");
  if (lp_norm(f, p) == 0.0)
    throw DegenerateInputError("localize: f is zero");

  const MetricSpace& sp = a.col_space();
  ClassChoice ch =
      sp.kind() == MetricSpace::Kind::ZInterval
          ? choose_class_z(a, f, L, p)
          : choose_class_covering(a, f, L, p);

  const int n = a.cols();
  std::vector<double> g(n);
  for (int x = 0; x < n; ++x) g[x] = ch.delta[x] * f[x];
  double gnorm = lp_norm(g, p);
  if (gnorm == 0.0)
    throw DegenerateInputError("localize: f vanishes on every thickened "
                               "class");

  // split g over the 2L-balls around the chosen centers
  const int balls = static_cast<int>(ch.centers.size());
  std::vector<int> owner(n, -1);
  for (int x = 0; x < n; ++x) {
    if (g[x] == 0.0) continue;
    double dbest = std::numeric_limits<double>::infinity();
    int best = -1;
    for (int b = 0; b < balls; ++b) {
      double d = sp.distance(x, ch.centers[b]);
      if (d < dbest) { dbest = d; best = b; }
    }
    owner[x] = best;
  }

  std::vector<double> gi_norm_p(balls, 0.0);  // ||g_i||_p^p (max for p=inf)
  for (int x = 0; x < n; ++x) {
    if (owner[x] < 0) continue;
    double v = std::abs(g[x]);
    if (p.is_inf())
      gi_norm_p[owner[x]] = std::max(gi_norm_p[owner[x]], v);
    else
      gi_norm_p[owner[x]] += std::pow(v, p.value());
  }
  // ||A g_i||_p via one pass over the columns of each part
  std::vector<double> scratch(a.rows(), 0.0);
  std::vector<int> touched;
  std::vector<double> agi_norm(balls, 0.0);
  std::vector<std::vector<int>> members(balls);
  for (int x = 0; x < n; ++x)
    if (owner[x] >= 0) members[owner[x]].push_back(x);
  for (int b = 0; b < balls; ++b) {
    touched.clear();
    for (int x : members[b]) {
      for (std::int32_t i : a.column(x)) {
        const Entry& e = a.entries()[i];
        if (scratch[e.row] == 0.0) touched.push_back(e.row);
        scratch[e.row] += e.value * g[x];
      }
    }
    double s = 0.0;
    for (int y : touched) {
      double v = std::abs(scratch[y]);
      s = p.is_inf() ? std::max(s, v)
                     : s + (p.value() == 1.0 ? v
                                             : std::pow(v, p.value()));
      scratch[y] = 0.0;
    }
    agi_norm[b] = p.is_inf() ? s : std::pow(s, p.inv());
  }

  int best_ball = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int b = 0; b < balls; ++b) {
    if (members[b].empty()) continue;
    double gn = p.is_inf() ? gi_norm_p[b] : std::pow(gi_norm_p[b], p.inv());
    if (gn == 0.0) continue;
    double ratio = agi_norm[b] / gn;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_ball = b;
    }
  }
  if (best_ball < 0)
    throw DegenerateInputError("localize: no nonzero ball part");

  LocalizeResult res;
  res.ball_center = ch.centers[best_ball];
  res.h.assign(n, 0.0);
  for (int x : members[best_ball]) res.h[x] = g[x];

  LocalizeCertificate& cert = res.certificate;
  cert.p = p;
  cert.L = L;
  cert.r = r;
  cert.C1 = ch.C1;
  cert.C2 = ch.C2;
  cert.ratio_f = rayleigh_ratio(a, f, p);
  cert.ratio_h = rayleigh_ratio(a, res.h, p);
  cert.bound = cert.C1 * (cert.ratio_f + cert.C2 * r / L);
  cert.holds = cert.ratio_h <= cert.bound * (1.0 + 1e-12) + 1e-300;
  cert.class_capture = gnorm / lp_norm(f, p);
  cert.num_balls = balls;
  cert.shift_or_color = ch.label;

  // support additivity across the distant balls
  double ag_norm = lp_norm(lpstab::apply(a, g), p);
  if (p.is_inf()) {
    double mx = 0.0;
    for (double v : agi_norm) mx = std::max(mx, v);
    cert.additivity_gap =
        std::abs(ag_norm - mx) / std::max({ag_norm, mx, 1e-300});
  } else {
    double sum = 0.0;
    for (double v : agi_norm) sum += std::pow(v, p.value());
    double whole = std::pow(ag_norm, p.value());
    cert.additivity_gap =
        std::abs(whole - sum) / std::max({whole, sum, 1e-300});
  }

  std::vector<int> supp;
  for (int x = 0; x < n; ++x)
    if (res.h[x] != 0.0) supp.push_back(x);
  cert.support_radius = sp.enclosing_ball(supp).radius;
  return res;
}

AlmostTsResult almost_ts_localize(const IndexedMatrix& a,
                                  const ApproximantFamily& family,
                                  std::span<const double> f, double L,
                                  Exponent p, double t, double s,
                                  double K_decay) {
  if (!(L >= 1.0)) throw ParameterError("almost_ts_localize: L must be >= 1");
  if (!(t > 0.0) || !(s > 0.0))
    throw ParameterError("almost_ts_localize: decay exponents must be "
                         "positive");
  const double d = std::max(1.0, a.col_space().growth_d());
  const double r = std::sqrt(L);
  const double v = std::pow(L, d);

  IndexedMatrix approx = family(r, v);
  if (approx.rows() != a.rows() || approx.cols() != a.cols())
    throw ShapeError("almost_ts_localize: approximant shape mismatch");
  if (approx.stats().thickness > r + 1e-9 ||
      approx.stats().sparseness > v + 1e-9)
    throw ParameterError(
        "almost_ts_localize: approximant exceeds requested thickness or "
        "sparseness");

  // measured |||A - A_{r,v}|||_{p->p} against the advertised decay budget
  std::vector<Entry> diff = a.entries();
  {
    std::vector<Entry> merged;
    merged.reserve(diff.size() + approx.entries().size());
    for (const Entry& e : diff) merged.push_back(e);
    for (const Entry& e : approx.entries())
      merged.push_back({e.row, e.col, -e.value});
    std::sort(merged.begin(), merged.end(),
              [](const Entry& x, const Entry& y) {
                return x.row != y.row ? x.row < y.row : x.col < y.col;
              });
    diff.clear();
    for (const Entry& e : merged) {
      if (!diff.empty() && diff.back().row == e.row &&
          diff.back().col == e.col)
        diff.back().value += e.value;
      else
        diff.push_back(e);
    }
  }
  IndexedMatrix delta = IndexedMatrix::from_entries(
      a.col_space_ptr(), a.rows(), a.rows_are_cols(), std::move(diff));
  IndexedMatrix abs_delta = abs(delta);
  double err;
  if (p.is_inf() || p.value() == 1.0 || p.value() == 2.0)
    err = op_norm(abs_delta, p).value;
  else {
    double n1 = op_norm(abs_delta, Exponent(1.0)).value;
    double ninf = op_norm(abs_delta, Exponent::inf()).value;
    err = std::pow(n1, p.inv()) * std::pow(ninf, 1.0 - p.inv());
  }
  const double budget =
      K_decay * (std::pow(r, -t) + std::pow(v, -s));
  if (err > budget * (1.0 + 1e-9))
    throw DecayViolationError(
        "almost_ts_localize: approximant family violates its decay bound",
        err, budget);

  LocalizeResult inner = localize(approx, f, L, p);

  AlmostTsResult res;
  res.h = inner.h;
  AlmostTsCertificate& c = res.certificate;
  c.p = p;
  c.L = L;
  c.r = r;
  c.v = v;
  c.t = t;
  c.s = s;
  c.approx_error = err;
  c.decay_budget = budget;
  c.inner = inner.certificate;
  c.ratio_f = rayleigh_ratio(a, f, p);
  c.ratio_h = rayleigh_ratio(a, res.h, p);
  c.C = std::max({c.inner.C1, c.inner.C1 * c.inner.C2,
                  (c.inner.C1 + 1.0) * std::max(K_decay, 1.0)});
  c.bound = c.C * (c.ratio_f + r / L + std::pow(r, -t) + std::pow(v, -s));
  c.holds = c.ratio_h <= c.bound * (1.0 + 1e-12) + 1e-300;
  return res;
}

}  // namespace lpstab
