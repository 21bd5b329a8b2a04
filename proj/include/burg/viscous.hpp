#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "burg/entropy_solution.hpp"
#include "burg/initial_velocity.hpp"

namespace burg {

// Viscous Burgers solution evaluated through the stabilized heat integral of
// the data potential (all exponentials in log space with max subtraction).
// The single-shock closed profile u = (x - L tanh(Lx/2 nu t))/t is available
// as its own kind: its potential x^2/2t - 2 nu ln cosh(Lx/2 nu t) is exact at
// every time, which makes it the reference for quadrature fidelity.
class ViscousSolution {
 public:
  static ViscousSolution from_initial(InitialVelocity data, double nu,
                                      double t0 = 0.0);
  // closed single-shock profile, taken as data at time t0 > 0; data() holds
  // the sawtooth skeleton the profile relaxes to as nu -> 0
  static ViscousSolution khokhlov_profile(double L, double nu, double t0 = 1.0);

  double nu() const { return nu_; }
  double t0() const { return t0_; }
  bool closed_form() const { return kind_ == Kind::khokhlov; }
  double profile_L() const { return L_; }
  const InitialVelocity& data() const { return u0_; }

  double data_velocity(double a) const;
  double data_potential(double a) const;  // includes the c0 gauge offset

  // phi_nu(a, s) for s >= t0, defined up to an a-independent gauge
  double potential(double a, double s) const;
  // -phi_nu(a,s)/(2 nu) evaluated without the round trip through the
  // potential, so the heat integral's log scale survives small nu
  double log_weight(double a, double s) const;

  // u_nu(x, t): closed form for the single-shock kind, heat integral else
  double velocity(double x, double t) const;

  // gauge knobs: constant added to the data potential, integrated drift
  // Gamma(s) added to phi(., s); densities must not move under either
  double c0 = 0.0;
  std::function<double(double)> gamma_shift;

  // label window containing all but e^-48 of the weight mass around x
  std::pair<double, double> label_range(double x, double s, double t) const;

 private:
  explicit ViscousSolution(InitialVelocity data) : u0_(std::move(data)) {}
  enum class Kind { general, khokhlov };
  Kind kind_ = Kind::general;
  InitialVelocity u0_;
  double nu_ = 0.0, t0_ = 0.0, L_ = 0.0;
};

// u = (x - L tanh(Lx/2 nu t))/t, exactly
double khokhlov_velocity(double L, double nu, double x, double t);

// Hopf-Cole quadrature from the data time: u(x,t) as the weighted mean of
// u0 under log-weights -(x-a)^2/(4 nu (t-t0)) - phi0(a)/(2 nu)
double hopf_cole_velocity(const ViscousSolution& v, double x, double t);

// Backward transition density of the stochastic flow from (x, t) to time s:
// density(a) proportional to exp(-[(x-a)^2/(2(t-s)) + phi(a,s)]/(2 nu)),
// normalized over the line. Gauge terms cancel in the normalization.
class TransitionDensity {
 public:
  double x() const { return x_; }
  double t() const { return t_; }
  double s() const { return s_; }
  double nu() const { return base_.nu(); }
  const ViscousSolution& base() const { return base_; }

  double log_density(double a) const;
  double density(double a) const;
  double log_normalizer() const { return log_z_; }

  double mass(double lo, double hi) const;  // integral of the density
  double normalization() const;             // mass over the whole support
  // int u_nu(a, s) density(a) da; equals u_nu(x, t) when the fixed point
  // identity holds
  double velocity_integral() const;

  const std::vector<std::pair<double, double>>& support() const {
    return windows_;
  }
  std::string to_csv(const std::vector<double>& grid) const;

 private:
  friend TransitionDensity transition_density(const ViscousSolution& v,
                                              double s, double x, double t);
  explicit TransitionDensity(ViscousSolution base) : base_(std::move(base)) {}
  ViscousSolution base_;
  double x_ = 0.0, t_ = 0.0, s_ = 0.0;
  double log_z_ = 0.0;
  std::vector<std::pair<double, double>> windows_;
  std::vector<double> kinks_;
};

TransitionDensity transition_density(const ViscousSolution& v, double s,
                                     double x, double t);

// Weak limit of the backward densities as nu -> 0: atoms on the minimizers
// of (x-a)^2/(2(t-s)) + phi*(a, s) of the inviscid limit.
struct LimitAtom {
  double a = 0.0;
  double weight = 0.0;        // mass at the smallest viscosity
  double weight_extrap = 0.0; // linear-in-nu extrapolation of the last pair
};

struct LimitSample {
  double nu = 0.0;
  std::vector<double> weights;  // per atom
  double residual = 0.0;        // mass outside every atom window
  double delta = 0.0;           // window half-width used
};

struct LimitMeasure {
  std::vector<LimitAtom> atoms;  // ordered left to right
  double residual = 0.0;
  // false within a whisker of a formation or merger instant, where the
  // two-sided picture does not apply and no limit is asserted
  bool generic = true;
  std::vector<LimitSample> per_nu;
  std::string to_json() const;
};

// family(nu) must produce the density of the nu-solution at (x_nu, s, t) with
// x_nu = x + O(nu); `limit` is the inviscid solution defining the atoms.
LimitMeasure limit_measure(const EntropySolution& limit,
                           const std::function<TransitionDensity(double)>& family,
                           double x, double s, double t,
                           std::vector<double> nus);

}  // namespace burg
