#pragma once

#include <vector>

#include "burg/numerics.hpp"

namespace burg {

// Initial velocity profile u0 with exact potential phi0(a) = c0 + int_0^a u0.
//
// Kinds:
//   riemann        step between u_minus (a<0) and u_plus (a>0)
//   linear_ramp    slope*a on |a|<=1, held constant outside the core
//   sawtooth       (a - L sign a)/t_ref; single decreasing jump at the origin
//   smooth_sampled monotonicity-limited cubic through (grid, values)
class InitialVelocity {
 public:
  enum class Kind { riemann, linear_ramp, sawtooth, smooth_sampled };

  static InitialVelocity riemann(double u_minus, double u_plus);
  static InitialVelocity linear_ramp(double slope);
  static InitialVelocity sawtooth(double L, double t_ref);
  static InitialVelocity smooth_sampled(std::vector<double> grid, std::vector<double> values);

  Kind kind() const { return kind_; }

  double u(double a) const;            // mean of one-sided limits at jumps
  double u(double a, int side) const;  // side<0: limit from below; side>0: from above
  double du(double a, int side = 0) const;
  double phi(double a) const;

  double sup_speed() const;                          // +inf for sawtooth
  double speed_bound(double alo, double ahi) const;  // sup |u0| over a window
  double scale() const;                              // velocity magnitude for tolerances

  const std::vector<double>& kinks() const { return kinks_; }  // u or u' breaks
  bool has_jump_at(double a) const;

  double c0 = 0.0;          // potential offset; physics is invariant under it
  double u_infinity = 0.0;  // far-field velocity (metadata for reports)

  double rm_left() const { return p1_; }
  double rm_right() const { return p2_; }
  double ramp_slope() const { return p1_; }
  double saw_L() const { return p1_; }
  double saw_tref() const { return p2_; }
  const Pchip& table() const { return tab_; }

 private:
  InitialVelocity() = default;
  Kind kind_ = Kind::riemann;
  double p1_ = 0.0, p2_ = 0.0;
  Pchip tab_;
  std::vector<double> kinks_;
};

}  // namespace burg
