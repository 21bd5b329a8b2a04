#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "burg/entropy_solution.hpp"
#include "burg/numerics.hpp"
#include "burg/rng.hpp"

namespace burg {

// Discrete part of the extended state: which side of the shock set a
// trajectory is on. `downward` marks the characteristic bundle entering a
// focusing formation point (only those carry positive probability).
enum class FlowLabel : int { left = -1, on_shock = 0, right = +1, downward = 2 };

// Per-segment branch-off law. All position-like quantities are tabulated
// against sigma = sqrt(tau - t_lo); the substitution absorbs the
// inverse-square-root density singularity at a formation time, so every
// table is smooth and the cumulative is exactly the swept reference-interval
// width (no quadrature enters the normalization).
struct SegmentLaw {
  int segment_id = -1;
  int parent = -1;
  std::vector<int> children;   // segments merging at t_lo (empty for leaves)
  std::vector<double> child_prob;     // branch probabilities B at the merger
  std::vector<double> child_u_star;   // child shock velocities just below t_lo
  double t_lo = 0.0, t_hi = 0.0;      // density support on this segment
  double sigma_max = 0.0;             // sqrt(t_hi - t_lo)
  double birth_atom = 0.0;            // focusing mass delivered exactly at t_lo
  double birth_b_lo = 0.0, birth_b_hi = 0.0;  // reference positions under the atom
  double mass = 0.0;                  // birth_atom + continuous mass
  double cum_start = 0.0;             // offset of this segment in the global CDF

  Pchip x;          // shock position x*(tau)
  Pchip u_minus, u_plus;
  Pchip width;      // swept reference-interval width, already / W (a CDF)
  Pchip b_lo;       // left reference endpoint (unnormalized)
  Pchip frac_plus;  // p_+ / (p_+ + p_-)
  Pchip inv_cdf;    // sigma as a function of continuous mass within the segment

  bool alive_at(double t) const {
    return t >= t_lo && (parent >= 0 ? t < t_hi : t <= t_hi);
  }
};

// Branch-off densities for the shock tree ending at segment shock_id at time
// tf, built from a uniform distribution of reference positions at time t0.
// Different admissible t0 give genuinely different laws for the same shock.
class BranchLaw {
 public:
  int shock_id = -1;
  double t0 = 0.0, tf = 0.0;
  double t_star = 0.0;  // earliest formation feeding the tree
  double x_f = 0.0, u_minus_f = 0.0, u_plus_f = 0.0;
  double width_f = 0.0;  // reference-interval width at tf
  std::vector<SegmentLaw> segments;

  double u_star_f() const { return 0.5 * (u_minus_f + u_plus_f); }

  const SegmentLaw& seg(int id) const;

  // pointwise densities from exact shock states (continuous part only)
  double p_side(int segment_id, double tau, int side) const;
  double p_plus(double tau) const;   // summed over segments alive at tau
  double p_minus(double tau) const;

  // integral (plus atoms) over the whole tree; 1 up to state precision
  double normalization() const;

  // probability that the branch time is <= t, i.e. that a path is still on
  // the shock set at time t; equals the complement of the continuous tail
  double on_shock_probability(double t) const;

  double segment_prob(int id) const;  // P_# of one segment
  double subtree_prob(int id) const;

  // ancestor of `id` whose lifetime contains t (walking merger links upward)
  int chain_segment(int id, double t) const;

  struct Draw {
    int seg = -1;
    double tau = 0.0;
    int side = 0;  // +1 right, -1 left, 0 downward (focusing atom)
    double x_branch = 0.0, u_branch = 0.0;
  };
  Draw sample(Rng& rng) const;

 private:
  friend BranchLaw branch_densities(const EntropySolution&, int, double, double);
  const EntropySolution* sol_ = nullptr;
};

BranchLaw branch_densities(const EntropySolution& sol, int shock_id, double t0,
                           double tf);

// lambda_pm(tau) = p_pm(tau) / P(tau); diverges as tau falls to t_star
std::pair<double, double> jump_rates(const BranchLaw& law, double tau);

// probability mass sitting exactly on the shock set at time t
double atom_mass(const BranchLaw& law, double t);

struct BackwardPath {
  double tau = 0.0;  // branch time
  int side = 0;      // +1 / -1 / 0 (downward)
  int seg = -1;      // segment the path branched from
  double x_branch = 0.0, u_branch = 0.0;
};

// Realizations x(t) on [t0_sol, tf]: along the shock set for t >= tau, then a
// straight characteristic with slope u_branch. Velocities are right-continuous.
class PathEnsemble {
 public:
  PathEnsemble(BranchLaw law, std::vector<BackwardPath> paths)
      : law_(std::move(law)), paths_(std::move(paths)) {}

  const BranchLaw& law() const { return law_; }
  std::size_t size() const { return paths_.size(); }
  const BackwardPath& path(std::size_t i) const { return paths_[i]; }

  double x_at(std::size_t i, double t) const;
  double xdot_at(std::size_t i, double t) const;  // D_t^+ x, right-continuous
  FlowLabel label_at(std::size_t i, double t) const;

  // CSV rows (path_id, tau, side, t, x, label) at the given sample times
  std::string to_csv(const std::vector<double>& times) const;

 private:
  BranchLaw law_;
  std::vector<BackwardPath> paths_;
};

// Inverse-CDF sampling; path i depends only on (seed, i), never on jobs.
PathEnsemble sample_paths(BranchLaw law, std::size_t n, std::uint64_t seed,
                          int jobs = 1);

// Comparator that never sits on the shock: branch exactly at tf, equal
// probability per side, then straight characteristics.
PathEnsemble sample_limiting_paths(BranchLaw law, std::size_t n, std::uint64_t seed);

struct MartingaleCheck {
  double t = 0.0;
  double mean = 0.0, sem = 0.0;
  double target = 0.0;  // u*_f
  bool pass = false;
};

struct ConditionalBin {
  double key = 0.0;        // mean of xdot(s) within the bin
  std::size_t n = 0;
  double mean_diff = 0.0;  // mean of xdot(t) - xdot(s)
  double sem = 0.0;
  bool pass = false;
};

struct ConditionalSlice {
  double t = 0.0;
  std::vector<ConditionalBin> bins;
};

struct MartingaleReport {
  double u_star_f = 0.0;
  std::vector<MartingaleCheck> unconditional;
  std::optional<double> conditioning_time;
  std::vector<ConditionalSlice> conditional;
  std::size_t unbinned = 0;  // samples dropped because a bin fell under 30
  double max_dev_over_sem = 0.0;
  bool pass = true;
  std::string to_json() const;
};

MartingaleReport verify_martingale(const PathEnsemble& ens,
                                   const std::vector<double>& times,
                                   std::optional<double> conditioning = {});

}  // namespace burg
