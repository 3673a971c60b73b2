#include "lpstab/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "lpstab/errors.hpp"
#include "detail.hpp"

namespace lpstab {

std::string Exponent::str() const {
  if (is_inf()) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", p_);
  return buf;
}

Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return Exponent::inf();
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(v > 0.0))
    throw ParameterError("exponent must be a positive number or 'inf': " +
                         text);
  return Exponent(v);
}

double lp_norm(std::span<const double> f, Exponent p) {
  if (!p.valid()) throw ParameterError("lp_norm: p must be positive");
  if (p.is_inf()) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
  }
  const double pv = p.value();
  double s = 0.0;
  if (pv == 1.0) {
    for (double x : f) s += std::abs(x);
    return s;
  }
  if (pv == 2.0) {
    for (double x : f) s += x * x;
    return std::sqrt(s);
  }
  for (double x : f) s += std::pow(std::abs(x), pv);
  return std::pow(s, 1.0 / pv);
}

namespace {

int coord_count(const std::vector<int>& dims) {
  int n = 1;
  for (int d : dims) n *= d;
  return n;
}

}  // namespace

MetricSpace MetricSpace::z_interval(int n) {
  if (n < 1) throw ParameterError("z_interval: n must be >= 1");
  MetricSpace s;
  s.kind_ = Kind::ZInterval;
  s.n_ = n;
  s.diameter_ = n - 1;
  s.measure_growth();
  s.validate_sampled_axioms();
  return s;
}

MetricSpace MetricSpace::zd_box(std::vector<int> dims) {
  if (dims.empty()) throw ParameterError("zd_box: need at least one dim");
  for (int d : dims)
    if (d < 1) throw ParameterError("zd_box: dims must be >= 1");
  MetricSpace s;
  s.kind_ = Kind::ZdBox;
  s.dims_ = std::move(dims);
  s.n_ = coord_count(s.dims_);
  int dm = 0;
  for (int d : s.dims_) dm = std::max(dm, d - 1);
  s.diameter_ = dm;
  s.measure_growth();
  s.validate_sampled_axioms();
  return s;
}

MetricSpace MetricSpace::tree(int degree, int radius) {
  if (degree < 2) throw ParameterError("tree: degree must be >= 2");
  if (radius < 0) throw ParameterError("tree: radius must be >= 0");
  MetricSpace s;
  s.kind_ = Kind::Tree;
  s.tree_degree_ = degree;
  s.tree_radius_ = radius;
  s.parent_.push_back(-1);
  s.depth_.push_back(0);
  // breadth-first: root gets `degree` children, others degree-1
  std::size_t head = 0;
  while (head < s.parent_.size()) {
    int x = static_cast<int>(head++);
    int dep = s.depth_[x];
    if (dep == radius) continue;
    int children = (x == 0) ? degree : degree - 1;
    for (int c = 0; c < children; ++c) {
      s.parent_.push_back(x);
      s.depth_.push_back(dep + 1);
    }
  }
  s.n_ = static_cast<int>(s.parent_.size());
  s.diameter_ = (s.n_ > 1) ? 2.0 * radius : 0.0;
  s.measure_growth();
  s.validate_sampled_axioms();
  return s;
}

MetricSpace MetricSpace::explicit_table(
    std::vector<std::vector<double>> table) {
  const int n = static_cast<int>(table.size());
  if (n < 1) throw ParameterError("explicit space: empty table");
  MetricSpace s;
  s.kind_ = Kind::Explicit;
  s.n_ = n;
  s.table_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(table[i].size()) != n)
      throw FormatError("explicit space: table is not square");
    for (int j = 0; j < n; ++j) {
      double d = table[i][j];
      if (!std::isfinite(d) || d < 0.0)
        throw FormatError("explicit space: distances must be finite and >= 0");
      s.table_[static_cast<std::size_t>(i) * n + j] = d;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (s.table_[static_cast<std::size_t>(i) * n + i] != 0.0)
      throw FormatError("explicit space: diagonal must be zero");
    for (int j = i + 1; j < n; ++j) {
      double dij = s.table_[static_cast<std::size_t>(i) * n + j];
      double dji = s.table_[static_cast<std::size_t>(j) * n + i];
      if (dij != dji)
        throw FormatError("explicit space: table is not symmetric");
      if (dij == 0.0)
        throw InvalidMetricError(
            "explicit space: zero distance between distinct points");
    }
  }
  s.diameter_ = *std::max_element(s.table_.begin(), s.table_.end());
  // triangle inequality: exhaustive on small tables, seeded sample above
  if (n <= 128) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (s.distance(i, j) > s.distance(i, k) + s.distance(k, j) + 1e-12)
            throw InvalidMetricError("explicit space: triangle inequality "
                                     "violated");
  } else {
    detail::Rng rng(0xABCD);
    for (int trial = 0; trial < 200000; ++trial) {
      int i = static_cast<int>(rng.uniform_int(n));
      int j = static_cast<int>(rng.uniform_int(n));
      int k = static_cast<int>(rng.uniform_int(n));
      if (s.distance(i, j) > s.distance(i, k) + s.distance(k, j) + 1e-12)
        throw InvalidMetricError("explicit space: triangle inequality "
                                 "violated");
    }
  }
  s.measure_growth();
  return s;
}

MetricSpace MetricSpace::discrete(int n) {
  if (n < 1) throw ParameterError("discrete space: n must be >= 1");
  MetricSpace s;
  s.kind_ = Kind::Discrete;
  s.n_ = n;
  s.diameter_ = n > 1 ? 1.0 : 0.0;
  s.measure_growth();
  return s;
}

double MetricSpace::distance(int a, int b) const {
  switch (kind_) {
    case Kind::ZInterval:
      return std::abs(a - b);
    case Kind::ZdBox: {
      int da = a, db = b, best = 0;
      for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
        int ca = da % dims_[i], cb = db % dims_[i];
        da /= dims_[i];
        db /= dims_[i];
        best = std::max(best, std::abs(ca - cb));
      }
      return best;
    }
    case Kind::Tree: {
      int x = a, y = b, d = 0;
      while (depth_[x] > depth_[y]) { x = parent_[x]; ++d; }
      while (depth_[y] > depth_[x]) { y = parent_[y]; ++d; }
      while (x != y) { x = parent_[x]; y = parent_[y]; d += 2; }
      return d;
    }
    case Kind::Explicit:
      return table_[static_cast<std::size_t>(a) * n_ + b];
    case Kind::Discrete:
      return a == b ? 0.0 : 1.0;
  }
  return 0.0;
}

int MetricSpace::volume(int x, double r) const {
  if (r < 0.0) return 0;
  switch (kind_) {
    case Kind::ZInterval: {
      int ri = static_cast<int>(std::floor(r));
      int lo = std::max(0, x - ri), hi = std::min(n_ - 1, x + ri);
      return hi - lo + 1;
    }
    case Kind::ZdBox: {
      int ri = static_cast<int>(std::floor(r));
      int v = 1, rem = x;
      for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
        int c = rem % dims_[i];
        rem /= dims_[i];
        int lo = std::max(0, c - ri), hi = std::min(dims_[i] - 1, c + ri);
        v *= hi - lo + 1;
      }
      return v;
    }
    default: {
      int v = 0;
      for (int y = 0; y < n_; ++y)
        if (distance(x, y) <= r) ++v;
      return v;
    }
  }
}

std::vector<int> MetricSpace::points_within(int x, double r) const {
  std::vector<int> out;
  if (r < 0.0) return out;
  switch (kind_) {
    case Kind::ZInterval: {
      int ri = static_cast<int>(std::floor(r));
      int lo = std::max(0, x - ri), hi = std::min(n_ - 1, x + ri);
      out.reserve(hi - lo + 1);
      for (int y = lo; y <= hi; ++y) out.push_back(y);
      return out;
    }
    default:
      for (int y = 0; y < n_; ++y)
        if (distance(x, y) <= r) out.push_back(y);
      return out;
  }
}

int MetricSpace::lattice_dims() const {
  if (kind_ == Kind::ZInterval) return 1;
  if (kind_ == Kind::ZdBox) return static_cast<int>(dims_.size());
  throw StructureError("not a lattice space");
}

std::vector<int> MetricSpace::lattice_offset(int y, int x) const {
  if (kind_ == Kind::ZInterval) return {y - x};
  if (kind_ != Kind::ZdBox) throw StructureError("not a lattice space");
  std::vector<int> off(dims_.size());
  int ry = y, rx = x;
  for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
    off[i] = ry % dims_[i] - rx % dims_[i];
    ry /= dims_[i];
    rx /= dims_[i];
  }
  return off;
}

MetricSpace::EnclosingBall MetricSpace::enclosing_ball(
    std::span<const int> points) const {
  if (points.empty()) return {};
  if (points.size() == 1) return {points[0], 0.0};
  if (kind_ == Kind::ZInterval) {
    auto [lo, hi] = std::minmax_element(points.begin(), points.end());
    int c = (*lo + *hi) / 2;
    double rad = std::max(c - *lo, *hi - c);
    return {c, rad};
  }
  if (kind_ == Kind::ZdBox) {
    // sup-metric: per-coordinate midpoints
    std::vector<int> lo(dims_.size(), std::numeric_limits<int>::max());
    std::vector<int> hi(dims_.size(), std::numeric_limits<int>::min());
    for (int pt : points) {
      int rem = pt;
      for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
        int c = rem % dims_[i];
        rem /= dims_[i];
        lo[i] = std::min(lo[i], c);
        hi[i] = std::max(hi[i], c);
      }
    }
    int center = 0;
    double rad = 0.0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      int c = (lo[i] + hi[i]) / 2;
      center = center * dims_[i] + c;
      rad = std::max(rad, static_cast<double>(std::max(c - lo[i],
                                                       hi[i] - c)));
    }
    return {center, rad};
  }
  // generic: the optimal center lies within max-dist of any support point
  int s0 = points[0];
  double r0 = 0.0;
  for (int pt : points) r0 = std::max(r0, distance(s0, pt));
  EnclosingBall best{s0, r0};
  for (int cand : points_within(s0, r0)) {
    double rad = 0.0;
    for (int pt : points) {
      rad = std::max(rad, distance(cand, pt));
      if (rad >= best.radius) break;
    }
    if (rad < best.radius) best = {cand, rad};
  }
  return best;
}

bool MetricSpace::double_ball_fits(int x, double r) const {
  switch (kind_) {
    case Kind::ZInterval:
      return x - 2 * r >= 0 && x + 2 * r <= n_ - 1;
    case Kind::ZdBox: {
      int rem = x;
      for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
        int c = rem % dims_[i];
        rem /= dims_[i];
        if (c - 2 * r < 0 || c + 2 * r > dims_[i] - 1) return false;
      }
      return true;
    }
    case Kind::Tree:
      return depth_[x] + 2 * r <= tree_radius_;
    case Kind::Explicit:
    case Kind::Discrete:
      return true;  // taken at face value, not as a truncation
  }
  return true;
}

void MetricSpace::measure_growth() {
  std::vector<double> radii;
  for (double r = 1.0; ; r *= 2.0) {
    radii.push_back(r);
    if (r >= std::max(diameter_, 1.0)) break;
  }
  // d: steepest dyadic log-slope of the max volume; K: tightest multiplier
  std::vector<int> vmax(radii.size(), 0);
  for (std::size_t ri = 0; ri < radii.size(); ++ri)
    for (int x = 0; x < n_; ++x)
      vmax[ri] = std::max(vmax[ri], volume(x, radii[ri]));
  double d = 0.0;
  for (std::size_t ri = 0; ri + 1 < radii.size(); ++ri)
    if (vmax[ri + 1] > vmax[ri])
      d = std::max(d, std::log2(static_cast<double>(vmax[ri + 1]) /
                                 vmax[ri]));
  growth_d_ = d;
  double K = 1.0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri)
    K = std::max(K, vmax[ri] / std::pow(radii[ri], d));
  growth_K_ = K;

  double D = 1.0;
  bool measured = false;
  for (double r : radii) {
    for (int x = 0; x < n_; ++x) {
      if (!double_ball_fits(x, r)) continue;
      measured = true;
      D = std::max(D, static_cast<double>(volume(x, 2 * r)) /
                          std::max(1, volume(x, r)));
    }
  }
  if (!measured) {
    // window too small for any interior double ball; fall back to all pairs
    for (double r : radii)
      for (int x = 0; x < n_; ++x)
        D = std::max(D, static_cast<double>(volume(x, 2 * r)) /
                            std::max(1, volume(x, r)));
  }
  doubling_D_ = D;
}

void MetricSpace::validate_sampled_axioms() const {
  detail::Rng rng(0x5eed);
  const int trials = std::min(2000, n_ * n_);
  for (int t = 0; t < trials; ++t) {
    int a = static_cast<int>(rng.uniform_int(n_));
    int b = static_cast<int>(rng.uniform_int(n_));
    int c = static_cast<int>(rng.uniform_int(n_));
    if (distance(a, b) != distance(b, a))
      throw InvalidMetricError("metric not symmetric");
    if ((distance(a, b) == 0.0) != (a == b))
      throw InvalidMetricError("metric does not separate points");
    if (distance(a, b) > distance(a, c) + distance(c, b) + 1e-12)
      throw InvalidMetricError("triangle inequality violated");
  }
}

BallCovering covering(const MetricSpace& space, double L, double alpha) {
  if (!(L > 0.0)) throw ParameterError("covering: L must be > 0");
  if (!(alpha >= 1.0)) throw ParameterError("covering: alpha must be >= 1");
  BallCovering cov;
  cov.L = L;
  cov.alpha = alpha;
  // greedy maximal L-separated net in id order
  for (int x = 0; x < space.size(); ++x) {
    bool ok = true;
    for (int c : cov.centers)
      if (space.distance(x, c) <= L) { ok = false; break; }
    if (ok) cov.centers.push_back(x);
  }
  const int m = static_cast<int>(cov.centers.size());
  // conflict graph: centers closer than alpha*L
  std::vector<std::vector<int>> adj(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (space.distance(cov.centers[i], cov.centers[j]) < alpha * L) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  cov.max_conflict_degree = 0;
  for (int i = 0; i < m; ++i)
    cov.max_conflict_degree =
        std::max(cov.max_conflict_degree, static_cast<int>(adj[i].size()));
  // greedy sequential coloring, first available color
  cov.color.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    std::vector<bool> used(adj[i].size() + 2, false);
    for (int j : adj[i])
      if (cov.color[j] != 0 &&
          cov.color[j] < static_cast<int>(used.size()))
        used[cov.color[j]] = true;
    int c = 1;
    while (used[c]) ++c;
    cov.color[i] = c;
    cov.num_colors = std::max(cov.num_colors, c);
  }
  return cov;
}

CoveringCheck check_covering(const MetricSpace& space,
                             const BallCovering& cov) {
  CoveringCheck res;
  for (int x = 0; x < space.size(); ++x) {
    bool hit = false;
    for (int c : cov.centers)
      if (space.distance(x, c) <= cov.L) { hit = true; break; }
    if (!hit) {
      res.covers = false;
      res.worst_point = x;
      break;
    }
  }
  const int m = static_cast<int>(cov.centers.size());
  for (int i = 0; i < m && res.separated; ++i)
    for (int j = i + 1; j < m; ++j)
      if (cov.color[i] == cov.color[j] &&
          space.distance(cov.centers[i], cov.centers[j]) <
              cov.alpha * cov.L) {
        res.separated = false;
        break;
      }
  res.color_bound = cov.num_colors <= cov.max_conflict_degree + 1;
  return res;
}

ColorClassSelection select_color_class(std::span<const double> f,
                                       const BallCovering& cov,
                                       const MetricSpace& space, Exponent p) {
  if (static_cast<int>(f.size()) != space.size())
    throw ShapeError("select_color_class: f has wrong length");
  double fnorm = lp_norm(f, p);
  if (fnorm == 0.0)
    throw DegenerateInputError("select_color_class: f is zero");
  const int m = static_cast<int>(cov.centers.size());
  double best = -1.0;
  int best_color = 0;
  for (int c = 1; c <= cov.num_colors; ++c) {
    // mask of [P_c]_L
    std::vector<double> masked(f.size(), 0.0);
    for (int i = 0; i < m; ++i) {
      if (cov.color[i] != c) continue;
      for (int x : space.points_within(cov.centers[i], cov.L))
        masked[x] = f[x];
    }
    double val = lp_norm(masked, p);
    if (val > best) {
      best = val;
      best_color = c;
    }
  }
  ColorClassSelection sel;
  sel.color = best_color;
  sel.ratio = best / fnorm;
  for (int i = 0; i < m; ++i)
    if (cov.color[i] == best_color) sel.centers.push_back(cov.centers[i]);
  return sel;
}

CutoffProfile cutoff(std::vector<int> P, double L, const MetricSpace& space) {
  if (P.empty()) throw DegenerateInputError("cutoff: empty center set");
  if (!(L > 0.0)) throw ParameterError("cutoff: L must be > 0");
  CutoffProfile prof;
  prof.P = std::move(P);
  prof.L = L;
  prof.values.resize(space.size());
  for (int x = 0; x < space.size(); ++x) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int c : prof.P) dmin = std::min(dmin, space.distance(x, c));
    prof.values[x] = std::max(0.0, 1.0 - dmin / (2.0 * L));
  }
  return prof;
}

CutoffCheck check_cutoff(const CutoffProfile& prof, const MetricSpace& space,
                         bool exhaustive_lipschitz) {
  CutoffCheck res;
  const int n = space.size();
  std::vector<double> dist(n);
  for (int x = 0; x < n; ++x) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int c : prof.P) dmin = std::min(dmin, space.distance(x, c));
    dist[x] = dmin;
  }
  const double twoL = 2.0 * prof.L;
  for (int x = 0; x < n; ++x) {
    double v = prof.values[x];
    if (v < 0.0 || v > 1.0) res.range_ok = false;
    if (dist[x] >= twoL && v != 0.0) res.support_ok = false;
    if (dist[x] <= prof.L && v < 0.5 - 1e-15) res.lower_half_ok = false;
  }
  if (exhaustive_lipschitz) {
    for (int x = 0; x < n && res.lipschitz_ok; ++x)
      for (int y = x + 1; y < n; ++y)
        if (std::abs(prof.values[x] - prof.values[y]) >
            space.distance(x, y) / twoL + 1e-12) {
          res.lipschitz_ok = false;
          break;
        }
  } else {
    detail::Rng rng(0xC0FFEE);
    for (int t = 0; t < std::min(200000, n * 8); ++t) {
      int x = static_cast<int>(rng.uniform_int(n));
      int y = static_cast<int>(rng.uniform_int(n));
      if (std::abs(prof.values[x] - prof.values[y]) >
          space.distance(x, y) / twoL + 1e-12) {
        res.lipschitz_ok = false;
        break;
      }
    }
  }
  return res;
}

}  // namespace lpstab
