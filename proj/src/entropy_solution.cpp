#include "burg/entropy_solution.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "burg/errors.hpp"

namespace burg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> time_grid(double lo, double hi, int n) {
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return ts;
}
}  // namespace

// ---------------------------------------------------------------- ShockTree

int ShockTree::root_of(int id) const {
  int cur = id;
  while (segments.at(cur).parent >= 0) cur = segments[cur].parent;
  return cur;
}

std::vector<int> ShockTree::subtree(int id) const {
  std::vector<int> out;
  std::deque<int> q{id};
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    out.push_back(cur);
    const auto& s = segments.at(cur);
    if (s.child_left >= 0) q.push_back(s.child_left);
    if (s.child_right >= 0) q.push_back(s.child_right);
  }
  return out;
}

std::vector<int> ShockTree::alive_in_subtree(int root, double t) const {
  std::vector<int> out;
  for (int id : subtree(root))
    if (segments[id].alive_at(t, horizon)) out.push_back(id);
  return out;
}

int ShockTree::segment_at(double t, double x, double tol) const {
  for (const auto& s : segments) {
    if (!s.alive_at(t, horizon) || s.samples.empty()) continue;
    const auto& sm = s.samples;
    double xs;
    if (t <= sm.front().t) {
      xs = sm.front().x;
    } else if (t >= sm.back().t) {
      xs = sm.back().x;
    } else {
      auto it = std::lower_bound(sm.begin(), sm.end(), t,
                                 [](const ShockSample& a, double tv) { return a.t < tv; });
      const auto &hi = *it, &lo = *(it - 1);
      const double w = (t - lo.t) / std::max(1e-300, hi.t - lo.t);
      xs = lo.x + w * (hi.x - lo.x);
    }
    if (std::abs(xs - x) <= tol) return s.id;
  }
  return -1;
}

// ----------------------------------------------------------- EntropySolution

EntropySolution::EntropySolution(InitialVelocity data, double t0, bool allow_expansion)
    : u0_(std::move(data)), t0_(t0), allow_expansion_(allow_expansion) {
  if (u0_.kind() == InitialVelocity::Kind::sawtooth)
    require(std::abs(u0_.saw_tref() - t0_) <= 1e-12 * std::max(1.0, std::abs(t0_)),
            Err::config_invalid, "sawtooth reference time must equal the data time");
  if (u0_.kind() == InitialVelocity::Kind::riemann && u0_.rm_left() < u0_.rm_right())
    require(allow_expansion_, Err::degenerate_data,
            "expansion step needs the expansion flag");
}

double EntropySolution::lagrangian_map(double a, double t) const {
  return a + (t - t0_) * u0_.u(a);
}

std::vector<EntropySolution::FormationEvent> EntropySolution::formation_events() const {
  // local minima of the piecewise-quadratic derivative of the interpolant
  std::vector<FormationEvent> events;
  if (u0_.kind() != InitialVelocity::Kind::smooth_sampled) return events;
  const auto& xs = u0_.table().knots();

  // features closer than a few knot spacings are one focusing event at this
  // data resolution (the interpolant's derivative wiggles at knot scale)
  const double dedup = 3.0 * (xs.back() - xs.front()) / double(xs.size() - 1);

  auto consider = [&](double a) {
    const double d = u0_.du(a);
    if (d >= -1e-12) return;
    // confirm a strict local minimum of u0' by comparing tiny offsets
    const double h = 1e-7 * (xs.back() - xs.front());
    if (u0_.du(a - h) < d - 1e-14 || u0_.du(a + h) < d - 1e-14) return;
    for (auto& e : events)
      if (std::abs(e.a_star - a) <= dedup) {
        if (d < e.slope) e = {a, d, t0_ + 1.0 / -d};
        return;
      }
    events.push_back({a, d, t0_ + 1.0 / -d});
  };

  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    // coarse scan of this piece, golden refinement of interior valleys
    const int m = 9;
    double prev2 = u0_.du(xs[i]), prev1 = u0_.du(xs[i] + h / m);
    for (int k = 2; k <= m; ++k) {
      const double a = xs[i] + h * k / m;
      const double cur = u0_.du(a);
      if (prev1 <= prev2 && prev1 <= cur) {
        const double lo = xs[i] + h * (k - 2) / m, hi = a;
        consider(golden_min([&](double q) { return u0_.du(q); }, lo, hi, 1e-13 * h));
      }
      prev2 = prev1;
      prev1 = cur;
    }
  }
  // knots themselves (derivative kinks there)
  for (size_t i = 0; i < xs.size(); ++i) {
    const double h = (xs.back() - xs.front()) * 1e-9;
    const double d = u0_.du(xs[i]);
    if (d < -1e-12 && u0_.du(xs[i] - h) >= d && u0_.du(xs[i] + h) >= d) consider(xs[i]);
  }
  std::sort(events.begin(), events.end(),
            [](auto& p, auto& q) { return p.t_star < q.t_star; });
  return events;
}

double EntropySolution::first_shock_time() const {
  using K = InitialVelocity::Kind;
  switch (u0_.kind()) {
    case K::riemann:
      return u0_.rm_left() > u0_.rm_right() ? t0_ : kInf;
    case K::linear_ramp:
      return u0_.ramp_slope() < 0.0 ? t0_ + 1.0 / -u0_.ramp_slope() : kInf;
    case K::sawtooth:
      return t0_;
    case K::smooth_sampled: {
      auto ev = formation_events();
      return ev.empty() ? kInf : ev.front().t_star;
    }
  }
  return kInf;
}

std::pair<double, double> EntropySolution::bracket(double x, double t) const {
  const double T = t - t0_;
  if (u0_.kind() == InitialVelocity::Kind::sawtooth) {
    const double L = u0_.saw_L(), tr = u0_.saw_tref();
    const double am = (x * tr - L * T) / t;
    const double ap = (x * tr + L * T) / t;
    const double pad = 0.5 * L + 0.01 * (std::abs(x) + L);
    return {std::min(am, 0.0) - pad, std::max(ap, 0.0) + pad};
  }
  const double M = u0_.sup_speed();
  const double pad = 0.05 * (1.0 + T * M) + 1e-9 * std::abs(x);
  return {x - T * M - pad, x + T * M + pad};
}

double EntropySolution::refine_minimum(double x, double t, double lo, double hi) const {
  const double T = t - t0_;
  auto dG = [&](double a) { return u0_.u(a) + (a - x) / T; };
  // an upward data jump can trap the minimum at the kink (expansion fan)
  for (double k : u0_.kinks()) {
    if (k <= lo || k >= hi || !u0_.has_jump_at(k)) continue;
    const double v = (x - k) / T;
    if (u0_.u(k, -1) <= v && v <= u0_.u(k, +1)) return k;
  }
  double flo = dG(lo), fhi = dG(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) != std::signbit(fhi))
    return find_root(dG, lo, hi, 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)));
  auto G = [&](double a) { return (x - a) * (x - a) / (2.0 * T) + u0_.phi(a); };
  return golden_min(G, lo, hi, 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)));
}

std::vector<EntropySolution::Minimum> EntropySolution::minimize(double x, double t) const {
  const double T = t - t0_;
  auto G = [&](double a) { return (x - a) * (x - a) / (2.0 * T) + u0_.phi(a); };
  auto [lo, hi] = bracket(x, t);
  const double cell = (hi - lo) / 2048.0;
  auto coarse = scan_minima(G, lo, hi, 2048, 1e-12 * (hi - lo));
  require(!coarse.empty(), Err::minimizer_not_bracketed, "no interior minimum");

  std::vector<Minimum> out;
  for (const auto& c : coarse) {
    require(!c.at_boundary, Err::minimizer_not_bracketed,
            "variational minimum at search-window edge");
    const double a = refine_minimum(x, t, std::max(lo, c.a - cell), std::min(hi, c.a + cell));
    const double v = G(a);
    bool dup = false;
    for (auto& m : out)
      if (std::abs(m.a - a) <= 1e-9 * (1.0 + std::abs(a))) {
        dup = true;
        if (v < m.value) m = {a, v};
      }
    if (!dup) out.push_back({a, v});
  }
  double gmin = kInf;
  for (const auto& m : out) gmin = std::min(gmin, m.value);
  const double keep = gmin + 1e-10 * std::max(1.0, std::abs(gmin));
  std::vector<Minimum> global;
  for (const auto& m : out)
    if (m.value <= keep) global.push_back(m);
  std::sort(global.begin(), global.end(), [](auto& p, auto& q) { return p.a < q.a; });
  return global;
}

EvalResult EntropySolution::evaluate(double x, double t) const {
  require(t >= t0_, Err::config_invalid, "evaluation before the data time");
  EvalResult r;
  if (t == t0_) {
    r.u_left = u0_.u(x, -1);
    r.u_right = u0_.u(x, +1);
    r.a_left = r.a_right = x;
    r.at_shock = u0_.has_jump_at(x) && r.u_left > r.u_right;
    return r;
  }
  const double T = t - t0_;
  auto mins = minimize(x, t);
  r.a_left = mins.front().a;
  r.a_right = mins.back().a;
  r.u_left = (x - r.a_left) / T;
  r.u_right = (x - r.a_right) / T;
  r.at_shock = (r.a_right - r.a_left) >
               1e-7 * (1.0 + std::abs(r.a_left) + std::abs(r.a_right));
  return r;
}

double EntropySolution::potential(double x, double t) const {
  require(t >= t0_, Err::config_invalid, "evaluation before the data time");
  if (t == t0_) return u0_.phi(x);
  auto mins = minimize(x, t);
  double v = kInf;
  for (const auto& m : mins) v = std::min(v, m.value);
  return v;
}

double EntropySolution::label_of(double x, double t) const {
  return evaluate(x, t).a_left;
}

double EntropySolution::gradient_from_label(double a, double t, int side) const {
  const double d = u0_.du(a, side);
  const double denom = 1.0 + (t - t0_) * d;
  return d / denom;
}

ShockState EntropySolution::state_from_labels(double t, double a_lo, double a_hi) const {
  ShockState s;
  s.t = t;
  s.a_minus = a_lo;
  s.a_plus = a_hi;
  s.x = 0.5 * (lagrangian_map(a_lo, t) + lagrangian_map(a_hi, t));
  s.u_minus = u0_.u(a_lo, -1);
  s.u_plus = u0_.u(a_hi, +1);
  s.du_minus = gradient_from_label(a_lo, t, -1);
  s.du_plus = gradient_from_label(a_hi, t, +1);
  return s;
}

ShockState EntropySolution::maxwell_solve(double t, double a_lo, double a_hi) const {
  const double T = t - t0_;
  auto F = [&](double a) { return a + T * u0_.u(a); };
  auto Gv = [&](double a, double x) {
    return (x - a) * (x - a) / (2.0 * T) + u0_.phi(a);
  };
  const double ascale = 1.0 + std::abs(a_lo) + std::abs(a_hi);

  // The admissible shock positions are bounded by the fold values of F: the
  // left endpoint exists only below the first local maximum right of it, the
  // right endpoint only above the last local minimum left of it. Find those
  // fold edges, then drive Psi(x) = G(al(x)) - G(ah(x)) (strictly increasing
  // in x) to zero by Newton safeguarded with bisection inside that range.
  double lo0 = std::min(a_lo, a_hi), hi0 = std::max(a_lo, a_hi);
  auto dF = [&](double a) { return 1.0 + T * u0_.du(a); };

  // widen until the seeds sit outside the folded zone; the absolute floor
  // matters when the seeds collapse to a point inside a fold
  for (int k = 0; k < 120 && dF(lo0) < 0.0; ++k)
    lo0 -= std::max(1e-3 * ascale, 0.1 * (hi0 - lo0));
  for (int k = 0; k < 120 && dF(hi0) < 0.0; ++k)
    hi0 += std::max(1e-3 * ascale, 0.1 * (hi0 - lo0));
  require(dF(lo0) >= 0.0 && dF(hi0) >= 0.0, Err::root_not_converged,
          "could not leave the folded zone");

  int first_neg = -1, last_neg = -1;
  const int grid = 2048;
  for (int i = 1; i < grid; ++i) {
    const double a = lo0 + (hi0 - lo0) * i / grid;
    if (dF(a) < 0.0) {
      if (first_neg < 0) first_neg = i;
      last_neg = i;
    }
  }
  if (first_neg < 0) {
    // no fold between the seeds: degenerate (zero-strength) state at one root
    if (F(hi0) - F(lo0) <= 1e-15 * ascale)
      return state_from_labels(t, 0.5 * (lo0 + hi0), 0.5 * (lo0 + hi0));
    const double xm = 0.5 * (F(lo0) + F(hi0));
    const double a = find_root([&](double a) { return F(a) - xm; }, lo0, hi0,
                               1e-15 * ascale);
    return state_from_labels(t, a, a);
  }
  const double f1 = find_root(dF, lo0 + (hi0 - lo0) * (first_neg - 1) / grid,
                              lo0 + (hi0 - lo0) * first_neg / grid, 1e-15 * ascale);
  const double f2 = find_root(dF, lo0 + (hi0 - lo0) * last_neg / grid,
                              lo0 + (hi0 - lo0) * (last_neg + 1) / grid, 1e-15 * ascale);

  // The endpoints live on the rising branches adjacent to those edges: al on
  // the branch ending at f1, ah on the branch starting at f2. March outward
  // for the far edge of each branch so every endpoint evaluation below is a
  // bracketed root on a monotone piece of F; that pins the solve to the
  // branches selected by the seeds even when several equal-minima pairs exist
  // (at a merger instant the tie is three-way). The march may stop as soon as
  // F drops past the other side's fold value: from there on the bracket is
  // valid for every admissible x whether or not the branch extends further.
  const double xscale = 1.0 + std::abs(F(f1)) + std::abs(F(f2));
  const double h = (hi0 - lo0) / grid;
  double bl = lo0, bh = hi0;
  for (int i = 1; i <= grid; ++i) {
    bl = lo0 - i * h;
    const double d = dF(bl);
    if (d < 0.0) {
      bl = find_root(dF, bl, bl + h, 1e-15 * ascale);
      break;
    }
    if (F(bl) <= F(f2) - 1e-12 * xscale) break;
  }
  for (int i = 1; i <= grid; ++i) {
    bh = hi0 + i * h;
    const double d = dF(bh);
    if (d < 0.0) {
      bh = find_root(dF, bh - h, bh, 1e-15 * ascale);
      break;
    }
    if (F(bh) >= F(f1) + 1e-12 * xscale) break;
  }

  double x_hi = std::min(F(f1), F(bh)) - 1e-15 * xscale;
  double x_lo = std::max(F(f2), F(bl)) + 1e-15 * xscale;
  // an empty window means the seeds span folds that have not merged: the
  // caller's bracket leaked past this shock
  require(x_lo <= x_hi, Err::root_not_converged, "empty admissible range");

  // root of F = x on a rising branch [blo, bhi]
  auto branch_root = [&](double blo, double bhi, double x) -> double {
    auto f = [&](double a) { return F(a) - x; };
    if (f(blo) >= 0.0) return blo;
    if (f(bhi) <= 0.0) return bhi;
    return find_root(f, blo, bhi, 1e-15 * ascale);
  };

  double al = a_lo, ah = a_hi;
  double x = std::clamp(0.5 * (F(a_lo) + F(a_hi)), x_lo, x_hi);
  for (int it = 0; it < 120; ++it) {
    al = branch_root(bl, f1, x);
    ah = branch_root(f2, bh, x);
    const double psi = Gv(al, x) - Gv(ah, x);
    if (psi < 0.0)
      x_lo = std::max(x_lo, x);
    else
      x_hi = std::min(x_hi, x);
    if (x_hi - x_lo <= 4e-16 * (1.0 + std::abs(x))) break;
    const double dpsi = (ah - al) / T;
    double xn = dpsi > 0.0 ? x - psi / dpsi : x;
    if (!(xn > x_lo && xn < x_hi)) xn = 0.5 * (x_lo + x_hi);
    if (std::abs(xn - x) <= 1e-16 * (1.0 + std::abs(x))) break;
    x = xn;
  }
  require(std::isfinite(al) && std::isfinite(ah) && ah - al > -1e-9 * ascale,
          Err::root_not_converged, "equal-minima states out of order");
  return state_from_labels(t, std::min(al, ah), std::max(al, ah));
}

// ------------------------------------------------------------- tree building

ShockState EntropySolution::shock_state_analytic(double t) const {
  using K = InitialVelocity::Kind;
  ShockState s;
  s.t = t;
  const double T = t - t0_;
  switch (u0_.kind()) {
    case K::riemann: {
      const double um = u0_.rm_left(), up = u0_.rm_right();
      s.x = 0.5 * (um + up) * T;
      s.u_minus = um;
      s.u_plus = up;
      s.a_minus = s.x - um * T;
      s.a_plus = s.x - up * T;
      s.du_minus = s.du_plus = 0.0;
      return s;
    }
    case K::linear_ramp: {
      const double m = -u0_.ramp_slope();  // positive for compressive data
      s.x = 0.0;
      s.a_minus = -m * T;
      s.a_plus = m * T;
      s.u_minus = m;
      s.u_plus = -m;
      s.du_minus = s.du_plus = 0.0;
      return s;
    }
    case K::sawtooth: {
      const double L = u0_.saw_L();
      s.x = 0.0;
      s.a_minus = -L * (1.0 - t0_ / t);
      s.a_plus = L * (1.0 - t0_ / t);
      s.u_minus = L / t;
      s.u_plus = -L / t;
      s.du_minus = s.du_plus = 1.0 / t;
      return s;
    }
    case K::smooth_sampled:
      fail(Err::config_invalid, "analytic state queried for sampled data");
  }
  return s;
}

void EntropySolution::build_analytic_tree(double horizon) const {
  using K = InitialVelocity::Kind;
  tree_ = ShockTree{};
  tree_.t0 = t0_;
  tree_.horizon = horizon;
  const double tstar = first_shock_time();
  if (!(tstar <= horizon)) return;

  ShockSegment seg;
  seg.id = 0;
  seg.t_form = tstar;
  seg.t_end = horizon;
  seg.focusing_atom = (u0_.kind() == K::linear_ramp);
  seg.a_seed = 0.0;
  const double t_lo = std::max(tstar, t0_ + 1e-12 * std::max(1.0, std::abs(t0_)));
  for (double t : time_grid(t_lo, horizon, 97)) {
    const ShockState s = shock_state_analytic(t);
    seg.samples.push_back({t, s.a_minus, s.a_plus, s.x});
  }
  tree_.segments.push_back(std::move(seg));
  tree_.alive_at_horizon = {0};
}

void EntropySolution::build_tracked_tree(double horizon) const {
  tree_ = ShockTree{};
  tree_.t0 = t0_;
  tree_.horizon = horizon;

  auto events = formation_events();
  struct Active {
    int id;
    double a_lo, a_hi;  // current labels
  };
  std::vector<Active> active;  // ordered by label interval

  auto record = [&](int id, double t, const ShockState& s) {
    auto& seg = tree_.segments[id];
    if (!seg.samples.empty() && seg.samples.back().t >= t) return;
    seg.samples.push_back({t, s.a_minus, s.a_plus, s.x});
  };

  // opening interval of a fresh shock shortly after its focusing time
  auto seed_segment = [&](const FormationEvent& e, double t) -> ShockState {
    const double T = t - t0_;
    auto dF = [&](double a) { return 1.0 + T * u0_.du(a); };
    const double span = u0_.table().x_back() - u0_.table().x_front();
    double w = 1e-9 * span;
    double flo = e.a_star, fhi = e.a_star;
    while (dF(flo) < 0.0) flo = e.a_star - (w *= 2.0);
    w = 1e-9 * span;
    while (dF(fhi) < 0.0) fhi = e.a_star + (w *= 2.0);
    // fold edges
    const double f_lo = find_root(dF, flo, e.a_star, 1e-15 * (1.0 + std::abs(e.a_star)));
    const double f_hi = find_root(dF, e.a_star, fhi, 1e-15 * (1.0 + std::abs(e.a_star)));
    return maxwell_solve(t, f_lo - (f_hi - f_lo), f_hi + (f_hi - f_lo));
  };

  size_t next_event = 0;
  double tc = kInf;
  if (!events.empty()) tc = events.front().t_star;
  if (!(tc <= horizon)) {
    tree_.alive_at_horizon.clear();
    return;
  }

  const double span = u0_.table().x_back() - u0_.table().x_front();
  const double delta0 = 1e-7 * std::max(1.0, tc - t0_);

  auto spawn_due = [&](double t) {
    while (next_event < events.size() && events[next_event].t_star <= t) {
      const auto& e = events[next_event];
      bool inside = false;
      for (const auto& ac : active)
        if (e.a_star >= ac.a_lo - 1e-9 * span && e.a_star <= ac.a_hi + 1e-9 * span)
          inside = true;
      if (!inside) {
        ShockSegment seg;
        seg.id = int(tree_.segments.size());
        seg.t_form = e.t_star;
        seg.t_end = horizon;
        seg.a_seed = e.a_star;
        tree_.segments.push_back(seg);
        const double ts = std::min(horizon, e.t_star + delta0);
        const ShockState st = seed_segment(e, ts);
        record(seg.id, ts, st);
        Active ac{seg.id, st.a_minus, st.a_plus};
        auto pos = std::find_if(active.begin(), active.end(),
                                [&](const Active& q) { return q.a_lo > ac.a_lo; });
        active.insert(pos, ac);
      }
      ++next_event;
    }
  };

  spawn_due(tc + delta0);
  tc = std::min(horizon, tc + delta0);

  auto endpoint_rhs = [&](double t, double a_lo, double a_hi, double& dlo, double& dhi) {
    const double T = t - t0_;
    const double um = u0_.u(a_lo, -1), up = u0_.u(a_hi, +1);
    const double sdot = 0.5 * (um + up);
    dlo = (sdot - um) / (1.0 + T * u0_.du(a_lo, -1));
    dhi = (sdot - up) / (1.0 + T * u0_.du(a_hi, +1));
  };

  auto rk4_predict = [&](const Active& ac, double t, double dt, double& plo, double& phi) {
    double k1l, k1h, k2l, k2h, k3l, k3h, k4l, k4h;
    endpoint_rhs(t, ac.a_lo, ac.a_hi, k1l, k1h);
    endpoint_rhs(t + 0.5 * dt, ac.a_lo + 0.5 * dt * k1l, ac.a_hi + 0.5 * dt * k1h, k2l, k2h);
    endpoint_rhs(t + 0.5 * dt, ac.a_lo + 0.5 * dt * k2l, ac.a_hi + 0.5 * dt * k2h, k3l, k3h);
    endpoint_rhs(t + dt, ac.a_lo + dt * k3l, ac.a_hi + dt * k3h, k4l, k4h);
    plo = ac.a_lo + dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
    phi = ac.a_hi + dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
  };

  auto solve_at = [&](const Active& ac, double t) -> ShockState {
    double plo, phi;
    const auto& seg = tree_.segments[ac.id];
    const double t_last = seg.samples.empty() ? t : seg.samples.back().t;
    rk4_predict(ac, t_last, t - t_last, plo, phi);
    return maxwell_solve(t, plo, phi);
  };

  double dt = 8.0 * delta0;
  int guard = 0;
  while (tc < horizon && ++guard < 200000) {
    double t_next = std::min(horizon, tc + dt);
    if (next_event < events.size()) t_next = std::min(t_next, events[next_event].t_star);

    // advance every active segment to t_next with the exact corrector
    std::vector<ShockState> st(active.size());
    bool shrink = false, stray = false;
    for (size_t i = 0; i < active.size() && !stray; ++i) {
      double plo, phi;
      rk4_predict(active[i], tc, t_next - tc, plo, phi);
      const double tol = 1e-9 * (1.0 + std::abs(plo) + std::abs(phi));
      try {
        ShockState s = maxwell_solve(t_next, plo, phi);
        // predictor straying from the corrected state means the step is too long
        if (std::abs(s.a_minus - plo) > 1e5 * tol || std::abs(s.a_plus - phi) > 1e5 * tol)
          shrink = true;
        st[i] = s;
      } catch (const Error&) {
        // the endpoint ODE is singular at a formation time, so a long step off
        // a young shock can fling the predictor across foreign folds; retry
        // shorter rather than trusting a wild bracket
        if (dt <= 16.0 * delta0) throw;
        stray = true;
      }
    }
    if (stray) {
      dt *= 0.5;
      continue;
    }
    // merger: intervals about to touch or positions out of order
    int hit = -1;
    for (size_t i = 0; i + 1 < active.size(); ++i)
      if (st[i].a_plus >= st[i + 1].a_minus - 1e-12 * span || st[i].x >= st[i + 1].x)
        hit = int(i);

    if (hit >= 0) {
      // bisect the merger time between tc and t_next
      double lo = tc, hi = t_next;
      for (int it = 0; it < 80 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const ShockState sl = solve_at(active[hit], mid);
        const ShockState sr = solve_at(active[hit + 1], mid);
        if (sl.a_plus >= sr.a_minus - 1e-12 * span || sl.x >= sr.x)
          hi = mid;
        else
          lo = mid;
      }
      const double tm = 0.5 * (lo + hi);
      ShockState sl = solve_at(active[hit], std::min(lo, tm));
      ShockState sr = solve_at(active[hit + 1], std::min(lo, tm));
      record(active[hit].id, std::min(lo, tm), sl);
      record(active[hit + 1].id, std::min(lo, tm), sr);

      ShockSegment merged;
      merged.id = int(tree_.segments.size());
      merged.t_form = tm;
      merged.t_end = horizon;
      merged.born_at_merger = true;
      merged.child_left = active[hit].id;
      merged.child_right = active[hit + 1].id;
      merged.a_seed = 0.5 * (sl.a_plus + sr.a_minus);
      tree_.segments[active[hit].id].t_end = tm;
      tree_.segments[active[hit].id].parent = merged.id;
      tree_.segments[active[hit + 1].id].t_end = tm;
      tree_.segments[active[hit + 1].id].parent = merged.id;
      tree_.segments.push_back(merged);

      const ShockState sm = maxwell_solve(tm, sl.a_minus, sr.a_plus);
      record(merged.id, tm, sm);
      active[hit] = Active{merged.id, sm.a_minus, sm.a_plus};
      active.erase(active.begin() + hit + 1);
      tc = tm;
      dt = std::max(dt / 4.0, 4.0 * delta0);
      continue;
    }

    if (shrink && dt > 16.0 * delta0) {
      dt *= 0.5;
      continue;
    }

    for (size_t i = 0; i < active.size(); ++i) {
      record(active[i].id, t_next, st[i]);
      active[i].a_lo = st[i].a_minus;
      active[i].a_hi = st[i].a_plus;
    }
    tc = t_next;
    const size_t before = tree_.segments.size();
    spawn_due(tc);
    // a newborn interval grows like sqrt(t - t_star): restart from short steps
    if (tree_.segments.size() != before)
      dt = 8.0 * delta0;
    else
      dt = std::min(dt * 1.4, 0.05 * std::max(tc - t0_, 1e-3));
  }

  for (const auto& ac : active) {
    tree_.segments[ac.id].t_end = horizon;
    tree_.alive_at_horizon.push_back(ac.id);
  }
}

void EntropySolution::build_tree(double horizon) const {
  if (u0_.kind() == InitialVelocity::Kind::smooth_sampled)
    build_tracked_tree(horizon);
  else
    build_analytic_tree(horizon);
  tree_built_ = true;
}

const ShockTree& EntropySolution::shock_tree(double horizon) const {
  if (!tree_built_ || tree_.horizon < horizon) build_tree(horizon);
  return tree_;
}

ShockState EntropySolution::shock_state(int segment_id, double t) const {
  require(tree_built_, Err::config_invalid, "shock tree not built yet");
  require(segment_id >= 0 && segment_id < int(tree_.segments.size()),
          Err::config_invalid, "unknown segment id");
  const auto& seg = tree_.seg(segment_id);
  require(t >= seg.t_form - 1e-12 && t <= seg.t_end + 1e-12, Err::config_invalid,
          "time outside segment lifetime");
  if (u0_.kind() != InitialVelocity::Kind::smooth_sampled) return shock_state_analytic(t);

  const auto& sm = seg.samples;
  require(!sm.empty(), Err::config_invalid, "segment has no samples");
  double alo, ahi;
  if (t <= sm.front().t) {
    alo = sm.front().a_lo;
    ahi = sm.front().a_hi;
  } else if (t >= sm.back().t) {
    alo = sm.back().a_lo;
    ahi = sm.back().a_hi;
  } else {
    auto it = std::lower_bound(sm.begin(), sm.end(), t,
                               [](const ShockSample& a, double tv) { return a.t < tv; });
    const auto &hi = *it, &lo = *(it - 1);
    const double w = (t - lo.t) / std::max(1e-300, hi.t - lo.t);
    alo = lo.a_lo + w * (hi.a_lo - lo.a_lo);
    ahi = lo.a_hi + w * (hi.a_hi - lo.a_hi);
  }
  return maxwell_solve(t, alo, ahi);
}

std::pair<double, double> EntropySolution::shock_interval(int segment_id, double t) const {
  const ShockState s = shock_state(segment_id, t);
  return {s.a_minus, s.a_plus};
}

}  // namespace burg
