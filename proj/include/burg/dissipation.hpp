#pragma once

#include <string>
#include <utility>
#include <vector>

#include "burg/entropy_solution.hpp"
#include "burg/numerics.hpp"

namespace burg {

// Convex entropy psi with companion flux J(u) = int u psi'(u) du.
// The linear pair (psi = u, and its negative) is carried along so momentum
// bookkeeping runs through the same machinery and must produce zero anomaly.
class EntropyPair {
 public:
  enum class Kind { linear, neg_linear, kinetic, quartic, absval, tabulated };

  static EntropyPair linear();
  static EntropyPair neg_linear();
  static EntropyPair kinetic();   // u^2/2
  static EntropyPair quartic();   // u^4
  static EntropyPair absval();    // |u|
  static EntropyPair tabulated(std::vector<double> grid, std::vector<double> values);

  Kind kind() const { return kind_; }
  const char* name() const;

  double psi(double u) const;
  // derivative; at a kink, the subgradient pointing toward `toward`
  double dpsi(double u, double toward) const;
  double flux(double u) const;  // J(u), J(0) = 0
  // psi(v) - psi(u) - psi'(u)(v - u), nonnegative for convex psi
  double bregman(double v, double u) const;
  // velocities where psi' has a kink (integration breakpoints)
  std::vector<double> kink_velocities() const;
  // true when psi itself has a corner (|u|), not just psi'
  bool psi_has_corners() const;

 private:
  EntropyPair() = default;
  Kind kind_ = Kind::kinetic;
  Pchip tab_;
};

struct ShockContribution {
  int shock_id = -1;
  double x = 0.0, u_minus = 0.0, u_plus = 0.0;
  double contribution = 0.0;  // = jump_term + bregman_term
  double jump_term = 0.0;
  double bregman_term = 0.0;  // <= 0 for convex psi
};

struct AnomalyReport {
  double t = 0.0;
  double total = 0.0;
  std::vector<ShockContribution> shocks;
  std::string to_json() const;
};

// Cumulative balance defect of int psi(u) dx from the data time to t.
AnomalyReport lagrangian_anomaly(const EntropySolution& sol, const EntropyPair& pair,
                                 double t);

// Instantaneous dissipation rate at time t written over the label intervals.
AnomalyReport instantaneous_rate(const EntropySolution& sol, const EntropyPair& pair,
                                 double t);

// The same rate from one-sided states and the companion flux only.
AnomalyReport eulerian_rate(const EntropySolution& sol, const EntropyPair& pair, double t);

// Partial-absorption profile s -> Delta_psi(s) for the merger chain rooted at
// root_segment, evaluated at n sample times in (t0, t]. Non-increasing in s.
std::vector<std::pair<double, double>> delta_psi_profile(const EntropySolution& sol,
                                                         const EntropyPair& pair,
                                                         int root_segment, double t,
                                                         int n_samples);

}  // namespace burg
