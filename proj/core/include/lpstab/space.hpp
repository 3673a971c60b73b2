#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lpstab/exponent.hpp"

namespace lpstab {

/// Finite metric space over point ids 0..size-1. Either a coordinate rule
/// (integer interval, integer box with sup-metric, rooted tree ball) or an
/// explicit distance table. Immutable after construction; growth and
/// doubling statistics are measured exhaustively on dyadic radii when the
/// space is built.
class MetricSpace {
public:
  enum class Kind { ZInterval, ZdBox, Tree, Explicit, Discrete };

  static MetricSpace z_interval(int n);
  static MetricSpace zd_box(std::vector<int> dims);
  /// Ball of the infinite tree in which the root has `degree` children and
  /// every later node has degree-1 children; graph metric.
  static MetricSpace tree(int degree, int radius);
  static MetricSpace explicit_table(std::vector<std::vector<double>> table);
  /// Plain index set with the 0/1 metric; used for abstract row sets.
  static MetricSpace discrete(int n);

  Kind kind() const { return kind_; }
  int size() const { return n_; }
  double distance(int a, int b) const;
  /// Cardinality of the closed ball B(x, r).
  int volume(int x, double r) const;
  std::vector<int> points_within(int x, double r) const;
  double diameter() const { return diameter_; }

  /// Measured growth exponent d with V(x,R) <= K * R^d on the window.
  double growth_d() const { return growth_d_; }
  double growth_K() const { return growth_K_; }
  /// Measured doubling constant over centers whose double ball fits the
  /// window (boundary-truncated balls would inflate it spuriously).
  double doubling_D() const { return doubling_D_; }

  bool is_lattice() const {
    return kind_ == Kind::ZInterval || kind_ == Kind::ZdBox;
  }
  int lattice_dims() const;
  /// Coordinate offset y - x for lattice kinds.
  std::vector<int> lattice_offset(int y, int x) const;

  /// Smallest radius of a ball (centered at a point of the space) containing
  /// all of `points`, together with a realizing center. O(1)-ish on lattices.
  struct EnclosingBall {
    int center = 0;
    double radius = 0.0;
  };
  EnclosingBall enclosing_ball(std::span<const int> points) const;

  /// Tree accessors (Kind::Tree only).
  int tree_degree() const { return tree_degree_; }
  int tree_radius() const { return tree_radius_; }
  int tree_depth(int x) const { return depth_[x]; }

  const std::vector<int>& box_dims() const { return dims_; }

private:
  MetricSpace() = default;
  void measure_growth();
  bool double_ball_fits(int x, double r) const;
  void validate_sampled_axioms() const;

  Kind kind_ = Kind::ZInterval;
  int n_ = 0;
  double diameter_ = 0.0;
  double growth_d_ = 0.0;
  double growth_K_ = 1.0;
  double doubling_D_ = 1.0;

  std::vector<int> dims_;       // ZdBox
  std::vector<int> parent_;     // Tree
  std::vector<int> depth_;      // Tree
  int tree_degree_ = 0;
  int tree_radius_ = 0;
  std::vector<double> table_;   // Explicit, row-major n*n
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Colored covering of the space by balls of radius L. Centers form a greedy
/// maximal L-separated net in id order; the conflict graph joins centers at
/// distance < alpha*L and is colored greedily, so same-color centers are
/// >= alpha*L apart and num_colors <= max conflict degree + 1.
struct BallCovering {
  double L = 0.0;
  double alpha = 6.0;
  std::vector<int> centers;
  std::vector<int> color;  // per center, values in 1..num_colors
  int num_colors = 0;
  int max_conflict_degree = 0;
};

BallCovering covering(const MetricSpace& space, double L, double alpha = 6.0);

struct CoveringCheck {
  bool covers = true;
  bool separated = true;
  bool color_bound = true;
  int worst_point = -1;
};
CoveringCheck check_covering(const MetricSpace& space, const BallCovering& cov);

struct ColorClassSelection {
  std::vector<int> centers;  // the chosen color class P
  int color = 0;
  double ratio = 0.0;  // ||1_{[P]_L} f||_p / ||f||_p
};

/// Picks the color class whose L-thickened set captures the most of f in
/// lp norm (smallest color index on ties). The ratio is at least
/// 1/num_colors for p >= 1.
ColorClassSelection select_color_class(std::span<const double> f,
                                       const BallCovering& cov,
                                       const MetricSpace& space, Exponent p);

/// The cutoff function max{0, 1 - d(x,P)/(2L)}: equal to 1 on P, at least
/// 1/2 within L of P, zero beyond 2L, and 1/(2L)-Lipschitz.
struct CutoffProfile {
  std::vector<int> P;
  double L = 0.0;
  std::vector<double> values;  // one per point of the space
};

CutoffProfile cutoff(std::vector<int> P, double L, const MetricSpace& space);

struct CutoffCheck {
  bool support_ok = true;    // zero whenever d(x,P) >= 2L
  bool lower_half_ok = true; // >= 1/2 whenever d(x,P) <= L
  bool lipschitz_ok = true;
  bool range_ok = true;      // within [0,1]
};
/// Exhaustive verification of the four cutoff properties; the Lipschitz
/// check runs over all pairs and costs O(n^2).
CutoffCheck check_cutoff(const CutoffProfile& prof, const MetricSpace& space,
                         bool exhaustive_lipschitz = true);

}  // namespace lpstab
