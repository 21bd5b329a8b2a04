#include "burg/initial_velocity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "burg/errors.hpp"

namespace burg {

InitialVelocity InitialVelocity::riemann(double u_minus, double u_plus) {
  InitialVelocity iv;
  iv.kind_ = Kind::riemann;
  iv.p1_ = u_minus;
  iv.p2_ = u_plus;
  iv.kinks_ = {0.0};
  iv.u_infinity = 0.5 * (u_minus + u_plus);
  return iv;
}

InitialVelocity InitialVelocity::linear_ramp(double slope) {
  require(slope != 0.0, Err::config_invalid, "ramp slope must be nonzero");
  InitialVelocity iv;
  iv.kind_ = Kind::linear_ramp;
  iv.p1_ = slope;
  iv.kinks_ = {-1.0, 1.0};
  iv.u_infinity = 0.0;
  return iv;
}

InitialVelocity InitialVelocity::sawtooth(double L, double t_ref) {
  require(L > 0.0, Err::config_invalid, "sawtooth needs L > 0");
  require(t_ref > 0.0, Err::config_invalid, "sawtooth needs a positive reference time");
  InitialVelocity iv;
  iv.kind_ = Kind::sawtooth;
  iv.p1_ = L;
  iv.p2_ = t_ref;
  iv.kinks_ = {0.0};
  iv.u_infinity = 0.0;
  return iv;
}

InitialVelocity InitialVelocity::smooth_sampled(std::vector<double> grid,
                                                std::vector<double> values) {
  InitialVelocity iv;
  iv.kind_ = Kind::smooth_sampled;
  iv.tab_ = Pchip(std::move(grid), std::move(values));
  iv.kinks_ = iv.tab_.knots();
  iv.u_infinity = 0.5 * (iv.tab_.values().front() + iv.tab_.values().back());
  return iv;
}

double InitialVelocity::u(double a) const {
  switch (kind_) {
    case Kind::riemann:
      if (a < 0.0) return p1_;
      if (a > 0.0) return p2_;
      return 0.5 * (p1_ + p2_);
    case Kind::linear_ramp:
      return p1_ * std::clamp(a, -1.0, 1.0);
    case Kind::sawtooth:
      if (a == 0.0) return 0.0;
      return (a - p1_ * (a > 0.0 ? 1.0 : -1.0)) / p2_;
    case Kind::smooth_sampled:
      return tab_(a);
  }
  return 0.0;
}

double InitialVelocity::u(double a, int side) const {
  if (side == 0 || !has_jump_at(a)) return u(a);
  if (kind_ == Kind::riemann) return side < 0 ? p1_ : p2_;
  // sawtooth jump at the origin
  return side < 0 ? p1_ / p2_ : -p1_ / p2_;
}

double InitialVelocity::du(double a, int side) const {
  switch (kind_) {
    case Kind::riemann:
      return 0.0;
    case Kind::linear_ramp:
      if (std::abs(a) < 1.0) return p1_;
      if (std::abs(a) > 1.0) return 0.0;
      // corner: pick the side requested, inward by default
      if (side == 0) return 0.5 * p1_;
      return (a > 0.0) == (side > 0) ? 0.0 : p1_;
    case Kind::sawtooth:
      return 1.0 / p2_;
    case Kind::smooth_sampled:
      return tab_.deriv(a);
  }
  return 0.0;
}

double InitialVelocity::phi(double a) const {
  switch (kind_) {
    case Kind::riemann:
      return c0 + (a < 0.0 ? p1_ : p2_) * a;
    case Kind::linear_ramp: {
      const double s = p1_;
      if (a > 1.0) return c0 + s * (a - 0.5);
      if (a < -1.0) return c0 + 0.5 * s - s * (a + 1.0);
      return c0 + 0.5 * s * a * a;
    }
    case Kind::sawtooth:
      return c0 + (0.5 * a * a - p1_ * std::abs(a)) / p2_;
    case Kind::smooth_sampled:
      return c0 + tab_.integral(0.0, a);
  }
  return c0;
}

double InitialVelocity::sup_speed() const {
  switch (kind_) {
    case Kind::riemann:
      return std::max(std::abs(p1_), std::abs(p2_));
    case Kind::linear_ramp:
      return std::abs(p1_);
    case Kind::sawtooth:
      return std::numeric_limits<double>::infinity();
    case Kind::smooth_sampled: {
      double m = 0.0;
      for (double v : tab_.values()) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

double InitialVelocity::speed_bound(double alo, double ahi) const {
  if (kind_ != Kind::sawtooth) return sup_speed();
  double m = std::max(std::abs(u(alo)), std::abs(u(ahi)));
  if (alo < 0.0 && ahi > 0.0) m = std::max(m, p1_ / p2_);
  return m;
}

double InitialVelocity::scale() const {
  switch (kind_) {
    case Kind::riemann:
      return std::max({std::abs(p1_), std::abs(p2_), 0.5 * std::abs(p1_ - p2_)});
    case Kind::linear_ramp:
      return std::abs(p1_);
    case Kind::sawtooth:
      return p1_ / p2_;
    case Kind::smooth_sampled:
      return std::max(sup_speed(), 1e-12);
  }
  return 1.0;
}

bool InitialVelocity::has_jump_at(double a) const {
  if (a != 0.0) return false;
  if (kind_ == Kind::riemann) return p1_ != p2_;
  if (kind_ == Kind::sawtooth) return true;
  return false;
}

}  // namespace burg
