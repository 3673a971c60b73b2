#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace lpstab {

/// Extended exponent p in (0, inf]. All exponent arithmetic goes through the
/// reciprocal 1/p, so p = inf behaves as 1/p = 0.
class Exponent {
public:
  constexpr Exponent() = default;
  constexpr explicit Exponent(double p) : p_(p) {}

  static constexpr Exponent inf() {
    return Exponent(std::numeric_limits<double>::infinity());
  }

  constexpr double value() const { return p_; }
  bool is_inf() const { return std::isinf(p_); }
  double inv() const { return is_inf() ? 0.0 : 1.0 / p_; }
  bool valid() const { return p_ > 0.0; }

  std::string str() const;

  friend bool operator==(Exponent a, Exponent b) { return a.p_ == b.p_; }
  friend bool operator!=(Exponent a, Exponent b) { return a.p_ != b.p_; }
  friend bool operator<(Exponent a, Exponent b) { return a.p_ < b.p_; }
  friend bool operator<=(Exponent a, Exponent b) { return a.p_ <= b.p_; }

private:
  double p_ = 2.0;
};

/// Parses "inf" or a positive number. Throws ParameterError otherwise.
Exponent parse_exponent(const std::string& text);

/// lp norm of a vector; the usual quasi-norm sum formula for 0 < p < 1,
/// max-abs for p = inf.
double lp_norm(std::span<const double> f, Exponent p);

}  // namespace lpstab
