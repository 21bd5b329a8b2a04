#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "burg/rng.hpp"
#include "burg/viscous.hpp"

namespace burg {

// Backward stochastic flow integrated in reversed physical time
// sigma = t - s': dxi = -u(xi, t - sigma) dsigma + sqrt(2 kappa) dW,
// xi(0) = x, run to sigma = t - s. The noise diffusivity kappa is
// independent of the viscosity nu entering the velocity; Pr = nu/kappa.
struct SdeConfig {
  enum class Source { khokhlov, stationary_shock, hopf_cole };
  Source source = Source::khokhlov;
  double L = 1.0;   // single-shock profile parameter
  double u0 = 1.0;  // stationary front amplitude
  std::optional<ViscousSolution> base;  // quadrature source
  double nu = 0.0;
  double kappa = 0.0;
  double x = 0.0;  // terminal point
  double t = 1.0;  // terminal time
  double s = 0.0;  // target time, s < t
  int step_count = 0;
  int n_paths = 0;
  std::uint64_t master_seed = 1;
};

struct PathEnsemble {
  std::vector<double> endpoints;  // one per path, deterministic per seed
  double dt = 0.0;
  double nu = 0.0, kappa = 0.0;
  double x = 0.0, t = 0.0, s = 0.0;
  std::uint64_t master_seed = 0;
  std::string to_csv() const;  // run parameters recorded in the header
};

PathEnsemble integrate_backward(const SdeConfig& cfg, int jobs = 1);

struct EscapeReport {
  double threshold = 0.0;
  double empirical_probability = 0.0;
  double std_error = 0.0;        // binomial
  double chebyshev_bound = 0.0;  // failure-probability bound
  double alpha = 1.0;
  std::size_t n = 0;
  double left_fraction = 0.0;  // endpoints on the negative side
};

// Reversed-time motion about a standing viscous front, started on the shock:
// dxi = u0 tanh(u0 xi / 2 nu) dtau + sqrt(2 kappa) dW with nu = Pr kappa
// (sign drift for Pr = 0). Escape means |xi(t)| >= alpha (1-eps) u0 t with
// alpha = min(1, 1/Pr); the bound is kappa/(eps^2 alpha^2 u0^2 t).
EscapeReport escape_probability(double u0, double Pr, double kappa, double t,
                                double epsilon, int n_paths,
                                std::uint64_t seed, double dt_scale = 1.0);

// Log-time form for the single-shock profile (reference time 1):
// dxi = -[xi - L tanh(L xi e^tau / 2 nu)] dtau + sqrt(2 kappa e^-tau) dW,
// xi(0) = 0. Escape means the double-well potential has dropped to the
// deterministic envelope: phi_*(xi) <= -alpha (1-eps) L^2 (1-e^-2tau)/2,
// alpha = min(1, 1/2Pr).
EscapeReport khokhlov_escape(double L, double Pr, double kappa,
                             double tau_horizon, double epsilon, int n_paths,
                             std::uint64_t seed);

// vanishing-viscosity potential of the log-time dynamics
inline double star_potential(double L, double x) {
  return -L * std::abs(x) + 0.5 * x * x;
}

struct EscapeScales {
  double tau_esc = 0.0;     // max(kappa, nu)/u0^2
  double ell_esc = 0.0;     // alpha^{-1/2} kappa/u0
  double half_escape = 0.0; // first time P(|xi| >= ell_esc) crosses 1/2
};

EscapeScales escape_scales(double Pr, double kappa, double u0,
                           int n_paths = 4000, std::uint64_t seed = 1);

// Radon-Nikodym exponent of the time-reversed against the direct path
// measure for the forward motion dX = u dt + sqrt(2 nu) dW on [t0, t1]:
//   W = phi(X1,t1)/nu - log rho_f(X1) + (1/nu) int dt_phi dt
//       - phi(X0,t0)/nu + log rho_0(X0),
// X0 ~ rho_0; rho_0, rho_f are free density choices. E(e^W) = 1 and
// E(W) <= 0 hold for the continuous process.
struct FluctuationConfig {
  enum class Source { khokhlov, stationary_shock };
  Source source = Source::khokhlov;
  double L = 1.0;
  double u0 = 1.0;
  double nu = 0.2;
  double t0 = 1.0, t1 = 2.0;
  std::function<double(Rng&)> sample0;
  std::function<double(double)> log_rho0;
  std::function<double(double)> log_rhof;
  int n_paths = 10000;
  std::uint64_t seed = 1;
  double variance_cap = 1e4;  // on the e^W sample variance
};

struct FluctuationReport {
  double mean_exp_w = 0.0;
  double exp_w_err = 0.0;  // jackknife
  double mean_w = 0.0;
  double w_err = 0.0;
  double var_exp_w = 0.0;
  std::size_t n = 0;
};

FluctuationReport fluctuation_check(const FluctuationConfig& cfg);

}  // namespace burg
