#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpstab/matrix.hpp"

namespace lpstab {

/// Estimate of lambda_p(A) = inf_{f != 0} ||Af||_p / ||f||_p. The witness
/// makes every estimate a certified upper bound on the true value.
enum class LambdaMethod { exact_svd, optimizer, localized_sweep, exact_small };

struct LambdaEstimate {
  Exponent p;
  double value = 0.0;
  std::vector<double> witness;
  LambdaMethod method = LambdaMethod::optimizer;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  double witness_support_radius = 0.0;
};

std::string lambda_method_name(LambdaMethod m);

/// ||A f||_p / ||f||_p.
double rayleigh_ratio(const IndexedMatrix& a, std::span<const double> f,
                      Exponent p);

/// Smallest singular value by dense decomposition, witness the right
/// singular vector. Throws CapacityError above max_dense_dim.
LambdaEstimate lambda_exact_2(const IndexedMatrix& a, int max_dense_dim = 3000);

struct Budget {
  int starts = 24;
  int iters = 400;
};

struct OptimizerOptions {
  /// Seed the p = 2 run with the exact singular witness when affordable.
  bool use_exact_p2_start = true;
  /// Add candidates obtained by localizing the current best witness.
  bool use_localized_starts = true;
  int max_dense_dim = 3000;
};

/// Multi-start normalized subgradient minimization of the ratio, with a
/// dense polish stage at p = 2. Deterministic for a fixed (seed, budget).
LambdaEstimate lambda_estimate(const IndexedMatrix& a, Exponent p,
                               Budget budget, std::uint64_t seed,
                               const OptimizerOptions& opts = {});

/// Exact lambda_p on small square windows for p in {1, 2, inf}, via the
/// inverse route 1/||A^{-1}||_p; for p = inf the maximum is also realized by
/// an exhaustive scan over the 2^n corner sign patterns. Returns 0 with a
/// kernel witness when A is numerically singular.
LambdaEstimate lambda_exact_small(const IndexedMatrix& a, Exponent p,
                                  int max_dim = 16);

/// Constants used by the localization certificate and the propagation
/// inequalities. On integer intervals the sharp values C1 = 3,
/// C2 = 3 r ||A||_sup and K = 18 apply; in general C1 = 2 * num_colors and
/// K = 2 * C' with C' measured from the covering.
struct PropagationConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double K = 0.0;
  double k = 0.0;  // chained constant, filled by chain_propagation
  double d = 0.0;  // growth exponent
  double r = 0.0;  // thickness
  double v = 0.0;  // sparseness
  double t = 0.0;  // decay exponents for the almost-thin-sparse scheme
  double s = 0.0;
  double u = 0.0;  // min{1/2, t/2, s*d}

  static double preset_u(double t, double s, double d);
  /// Integer-interval constants for a thin-thin matrix.
  static PropagationConstants z_constants(const IndexedMatrix& a);
  /// Generic constants measured from a covering of the column space.
  static PropagationConstants measured(const IndexedMatrix& a,
                                       double covering_L);
};

struct LocalizeCertificate {
  Exponent p;
  double L = 0.0;
  double r = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double ratio_f = 0.0;          // ||Af||_p / ||f||_p
  double ratio_h = 0.0;          // ratio of the returned localized function
  double bound = 0.0;            // C1 * (ratio_f + C2 * r / L)
  bool holds = false;
  double class_capture = 0.0;    // ||g||_p / ||f||_p for g = Delta_P f
  double additivity_gap = 0.0;   // | ||Ag||_p^p - sum_i ||Ag_i||_p^p | rel.
  double support_radius = 0.0;   // enclosing radius of supp(h), <= 2L
  int num_balls = 0;
  int shift_or_color = 0;        // chosen progression shift (Z) or color
};

struct LocalizeResult {
  std::vector<double> h;
  int ball_center = 0;
  LocalizeCertificate certificate;
};

/// Constructive localization: returns a nonzero h supported in a ball of
/// radius 2L whose ratio is controlled by the certificate inequality. On
/// integer intervals the color classes are the arithmetic progressions
/// {x0 + 6kL} with the capture-optimal shift x0.
LocalizeResult localize(const IndexedMatrix& a, std::span<const double> f,
                        double L, Exponent p);

enum class PropagationVariant { TS, ThinOnly };

/// Lower bound on lambda_p implied by lambda_q and the one-step propagation
/// inequality; requires gap |d/p - d/q| < 1. ThinOnly drops the sparseness
/// factor but needs p <= q.
double propagation_bound(double lambda_q, Exponent p, Exponent q,
                         const PropagationConstants& c,
                         PropagationVariant variant = PropagationVariant::TS);

enum class Verdict { degenerate, uniformly_bounded_below };
std::string verdict_name(Verdict v);

struct StabilityReport {
  std::vector<LambdaEstimate> estimates;  // one per grid exponent
  double lambda_small = 0.0;   // min over the grid
  double Lambda_big = 0.0;     // max over the grid
  Exponent p_m;                // attaining exponents
  Exponent p_M;
  double sigma_max = 0.0;      // ||A||_2 scale used by the verdict threshold
  Verdict verdict = Verdict::degenerate;
  std::uint64_t seed = 0;
};

/// Exponents must include 1, 2 and inf unless allow_sparse_grid is set.
std::vector<Exponent> default_p_grid();

StabilityReport stability_report(const IndexedMatrix& a,
                                 std::span<const Exponent> p_grid,
                                 Budget budget, std::uint64_t seed,
                                 bool allow_sparse_grid = false,
                                 const OptimizerOptions& opts = {});

struct ChainStep {
  Exponent from;
  Exponent to;
  double gap = 0.0;       // |d/from - d/to|
  double factor = 0.0;    // divisor K * v^.. * r^..
  double exponent = 0.0;  // 1 / (1 - gap)
};

struct Zrem2Check {
  double denominator = 0.0;  // 162 * r^3 * ||A||_sup, r floored at 1
  std::vector<Exponent> grid;
  std::vector<double> lambda_hat;
  std::vector<double> rhs;  // (lambda_hat_p - tol)^2 / denominator
  double tol = 1e-6;
  bool holds = false;
};

struct ChainResult {
  std::vector<ChainStep> steps;
  double k_constant = 0.0;       // accumulated constant
  double Lambda_exponent = 0.0;  // accumulated exponent on Lambda
  double bound = 0.0;            // k * Lambda^exponent
  bool consistent = false;       // measured lambda >= bound
  std::optional<Zrem2Check> zrem2;
};

/// Chains one-step inequalities from p_M to p_m in steps of size <= 1/2 in
/// d/p, accumulating the constant and the exponent; evaluates the
/// single-step integer-interval bound lambda_2 >= Lambda^2/(162 r^3 ||A||_sup)
/// when the column space is an interval.
ChainResult chain_propagation(const StabilityReport& report,
                              const PropagationConstants& c,
                              const IndexedMatrix& a);

/// Family of thin-sparse approximants indexed by (thickness, sparseness).
using ApproximantFamily =
    std::function<IndexedMatrix(double r, double v)>;

struct AlmostTsCertificate {
  Exponent p;
  double L = 0.0, r = 0.0, v = 0.0, t = 0.0, s = 0.0;
  double approx_error = 0.0;        // measured |||A - A_{r,v}|||_{p->p} bound
  double decay_budget = 0.0;        // K * (r^-t + v^-s)
  double ratio_f = 0.0;
  double ratio_h = 0.0;             // against the full A
  double C = 0.0;                   // combined constant
  double bound = 0.0;               // C * (ratio_f + r/L + r^-t + v^-s)
  bool holds = false;
  LocalizeCertificate inner;        // the certificate against A_{r,v}
};

struct AlmostTsResult {
  std::vector<double> h;
  AlmostTsCertificate certificate;
};

struct AlmostTsPreset {
  double r = 0.0, v = 0.0, L = 0.0, u = 0.0;
};
/// The choice r = L^{1/2}, v = L^d, L = lambda_p^{-1/u}, u = min{1/2,t/2,sd}.
AlmostTsPreset almost_ts_preset(double lambda_p, double t, double s, double d);

AlmostTsResult almost_ts_localize(const IndexedMatrix& a,
                                  const ApproximantFamily& family,
                                  std::span<const double> f, double L,
                                  Exponent p, double t, double s,
                                  double K_decay);

/// Closed-form bound on the lq tail past the m largest terms of a
/// decreasing sequence with unit lp mass:
/// (p/q)^{1/q} (1-p/q)^{1/p-1/q} / m^{1/p-1/q}; (m+1)^{-1/p} at q = inf.
double sequence_tail_bound(double p, Exponent q, int m);

struct ThinningResult {
  IndexedMatrix A_m;
  double scale = 1.0;        // normalization factor divided out of A
  double v_of_r = 0.0;       // max ball volume at the thickness radius
  double bound = 0.0;        // C v(r)^{1-1/q} / m^{1/p-1/q} at the given q
  double measured_1 = 0.0;   // |||A - A_m|||_{q->q} on the normalized matrix
  double measured_2 = 0.0;
  double measured_inf = 0.0;
};

/// Keeps the m largest-magnitude entries of each column (ties by smallest
/// row id) after normalizing A so columns have unit lp mass at most.
ThinningResult top_m_thinning(const IndexedMatrix& a, int m, double p,
                              Exponent q);

}  // namespace lpstab
