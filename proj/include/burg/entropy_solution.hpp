#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "burg/initial_velocity.hpp"

namespace burg {

struct EvalResult {
  double u_left = 0.0, u_right = 0.0;  // one-sided velocities at (x,t)
  double a_left = 0.0, a_right = 0.0;  // extreme minimizing labels
  bool at_shock = false;
  double mean() const { return 0.5 * (u_left + u_right); }
};

struct ShockState {
  double t = 0.0;
  double x = 0.0;
  double u_minus = 0.0, u_plus = 0.0;    // one-sided velocities, u_minus > u_plus
  double a_minus = 0.0, a_plus = 0.0;    // data-time labels bounding the interval
  double du_minus = 0.0, du_plus = 0.0;  // one-sided velocity gradients in x
  double speed() const { return 0.5 * (u_minus + u_plus); }
  double jump() const { return u_minus - u_plus; }
};

struct ShockSample {
  double t, a_lo, a_hi, x;
};

struct ShockSegment {
  int id = -1;
  int parent = -1;                       // segment absorbed into at t_end
  int child_left = -1, child_right = -1; // segments merging at t_form
  double t_form = 0.0;
  double t_end = 0.0;  // merger time, or tree horizon for surviving segments
  bool born_at_merger = false;
  // straight-segment data focuses a whole label interval at once; such
  // segments are born with a finite interval instead of zero width
  bool focusing_atom = false;
  double a_seed = 0.0;
  std::vector<ShockSample> samples;
  bool alive_at(double t, double horizon) const {
    if (t < t_form - 1e-14) return false;
    if (parent >= 0) return t < t_end;
    return t <= horizon + 1e-14;
  }
};

struct ShockTree {
  double t0 = 0.0, horizon = 0.0;
  std::vector<ShockSegment> segments;
  std::vector<int> alive_at_horizon;

  const ShockSegment& seg(int id) const { return segments.at(id); }
  int root_of(int id) const;
  std::vector<int> subtree(int id) const;
  std::vector<int> alive_in_subtree(int root, double t) const;
  int segment_at(double t, double x, double tol) const;
};

// Exact entropy solution by variational evaluation of the data potential.
class EntropySolution {
 public:
  EntropySolution(InitialVelocity data, double t0, bool allow_expansion = false);

  const InitialVelocity& data() const { return u0_; }
  double t0() const { return t0_; }

  // position of the straight characteristic from label a (ignores shocks)
  double lagrangian_map(double a, double t) const;

  double first_shock_time() const;

  EvalResult evaluate(double x, double t) const;
  double potential(double x, double t) const;

  // unique back label off-shock (left extreme on a shock)
  double label_of(double x, double t) const;

  const ShockTree& shock_tree(double horizon) const;
  ShockState shock_state(int segment_id, double t) const;
  std::pair<double, double> shock_interval(int segment_id, double t) const;

  // Eulerian one-sided gradient from a label just outside an interval
  double gradient_from_label(double a, double t, int side) const;

 private:
  InitialVelocity u0_;
  double t0_;
  bool allow_expansion_;
  mutable ShockTree tree_;
  mutable bool tree_built_ = false;

  struct Minimum {
    double a;
    double value;
  };
  std::vector<Minimum> minimize(double x, double t) const;
  std::pair<double, double> bracket(double x, double t) const;
  double refine_minimum(double x, double t, double lo, double hi) const;
  void build_tree(double horizon) const;
  void build_analytic_tree(double horizon) const;
  void build_tracked_tree(double horizon) const;
  ShockState shock_state_analytic(double t) const;
  ShockState state_from_labels(double t, double a_lo, double a_hi) const;
  // equal-minima shock solve near a seeded label interval; returns refined state
  ShockState maxwell_solve(double t, double a_lo, double a_hi) const;
  struct FormationEvent {
    double a_star, slope, t_star;
  };
  std::vector<FormationEvent> formation_events() const;
};

}  // namespace burg
