#include "burg/dissipation.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "burg/errors.hpp"

namespace burg {

EntropyPair EntropyPair::linear() {
  EntropyPair p;
  p.kind_ = Kind::linear;
  return p;
}
EntropyPair EntropyPair::neg_linear() {
  EntropyPair p;
  p.kind_ = Kind::neg_linear;
  return p;
}
EntropyPair EntropyPair::kinetic() {
  EntropyPair p;
  p.kind_ = Kind::kinetic;
  return p;
}
EntropyPair EntropyPair::quartic() {
  EntropyPair p;
  p.kind_ = Kind::quartic;
  return p;
}
EntropyPair EntropyPair::absval() {
  EntropyPair p;
  p.kind_ = Kind::absval;
  return p;
}

EntropyPair EntropyPair::tabulated(std::vector<double> grid, std::vector<double> values) {
  require(grid.size() >= 3, Err::config_invalid, "tabulated entropy needs >= 3 knots");
  // secant slopes must be nondecreasing, otherwise the table is not convex
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    double s0 = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
    double s1 = (values[i + 2] - values[i + 1]) / (grid[i + 2] - grid[i + 1]);
    require(s1 >= s0 - 1e-12, Err::config_invalid, "tabulated entropy is not convex");
  }
  EntropyPair p;
  p.kind_ = Kind::tabulated;
  p.tab_ = Pchip(std::move(grid), std::move(values));
  return p;
}

const char* EntropyPair::name() const {
  switch (kind_) {
    case Kind::linear: return "linear";
    case Kind::neg_linear: return "neg_linear";
    case Kind::kinetic: return "kinetic";
    case Kind::quartic: return "quartic";
    case Kind::absval: return "absval";
    case Kind::tabulated: return "tabulated";
  }
  return "?";
}

double EntropyPair::psi(double u) const {
  switch (kind_) {
    case Kind::linear: return u;
    case Kind::neg_linear: return -u;
    case Kind::kinetic: return 0.5 * u * u;
    case Kind::quartic: return u * u * u * u;
    case Kind::absval: return std::abs(u);
    case Kind::tabulated: return tab_(u);
  }
  return 0.0;
}

double EntropyPair::dpsi(double u, double toward) const {
  switch (kind_) {
    case Kind::linear: return 1.0;
    case Kind::neg_linear: return -1.0;
    case Kind::kinetic: return u;
    case Kind::quartic: return 4.0 * u * u * u;
    case Kind::absval:
      if (u > 0.0) return 1.0;
      if (u < 0.0) return -1.0;
      return toward >= 0.0 ? 1.0 : -1.0;
    case Kind::tabulated: return tab_.deriv(u);
  }
  return 0.0;
}

double EntropyPair::flux(double u) const {
  switch (kind_) {
    case Kind::linear: return 0.5 * u * u;
    case Kind::neg_linear: return -0.5 * u * u;
    case Kind::kinetic: return u * u * u / 3.0;
    case Kind::quartic: return 0.8 * u * u * u * u * u;
    case Kind::absval: return 0.5 * std::abs(u) * u;
    case Kind::tabulated:
      // int_0^u v psi'(v) dv = u psi(u) - int_0^u psi, exact for the table
      return u * tab_(u) - tab_.integral(0.0, u);
  }
  return 0.0;
}

double EntropyPair::bregman(double v, double u) const {
  return psi(v) - psi(u) - dpsi(u, v) * (v - u);
}

std::vector<double> EntropyPair::kink_velocities() const {
  if (kind_ == Kind::absval) return {0.0};
  if (kind_ == Kind::tabulated) return tab_.knots();  // psi' corners
  return {};
}

bool EntropyPair::psi_has_corners() const { return kind_ == Kind::absval; }

namespace {

// Genuine corner/jump locations of the data; a sampled profile is C^1, so its
// knots need no special treatment by the adaptive rule.
std::vector<double> data_corners(const InitialVelocity& u0, double lo, double hi) {
  std::vector<double> br;
  if (u0.kind() == InitialVelocity::Kind::smooth_sampled) return br;
  for (double k : u0.kinks())
    if (k > lo && k < hi) br.push_back(k);
  return br;
}

// Breakpoints for label-space quadrature over [alo, ahi]: data corners, labels
// where the uniform fan velocity (xs - a)/T crosses a kink of psi', and sign
// structure of u0 itself where psi' may kink.
std::vector<double> label_breaks(const EntropySolution& sol, const EntropyPair& pair,
                                 double alo, double ahi, double xs, double T) {
  std::vector<double> br = data_corners(sol.data(), alo, ahi);
  for (double v : pair.kink_velocities()) {
    double a = xs - T * v;  // the fan velocity (xs - a)/T equals v here
    if (a > alo && a < ahi) br.push_back(a);
  }
  // psi itself kinks only for |u|; isolate where the data crosses that level
  if (pair.psi_has_corners()) {
    for (double v : pair.kink_velocities()) {
      const int n = 64;
      double prev = sol.data().u(alo) - v;
      for (int i = 1; i <= n; ++i) {
        double ai = alo + (ahi - alo) * i / n;
        double cur = sol.data().u(ai) - v;
        if (prev == 0.0) br.push_back(alo + (ahi - alo) * (i - 1) / n);
        if (prev * cur < 0.0) {
          double lo = alo + (ahi - alo) * (i - 1) / n;
          br.push_back(find_root([&](double a) { return sol.data().u(a) - v; }, lo, ai));
        }
        prev = cur;
      }
    }
  }
  return br;
}

ShockContribution lagrangian_piece(const EntropySolution& sol, const EntropyPair& pair,
                                   const ShockState& st, int id) {
  const double T = st.t - sol.t0();
  const auto& u0 = sol.data();
  auto fan = [&](double a) { return (st.x - a) / T; };  // spans [u_plus, u_minus]
  auto breaks = label_breaks(sol, pair, st.a_minus, st.a_plus, st.x, T);

  ShockContribution c;
  c.shock_id = id;
  c.x = st.x;
  c.u_minus = st.u_minus;
  c.u_plus = st.u_plus;
  c.jump_term = integrate_split(
      [&](double a) {
        double uf = fan(a), ud = u0.u(a);
        return pair.dpsi(uf, ud) * (uf - ud);
      },
      st.a_minus, st.a_plus, breaks);
  c.bregman_term = -integrate_split(
      [&](double a) { return pair.bregman(u0.u(a), fan(a)); }, st.a_minus, st.a_plus,
      breaks);
  c.contribution = integrate_split(
      [&](double a) { return pair.psi(fan(a)) - pair.psi(u0.u(a)); }, st.a_minus,
      st.a_plus, breaks);
  return c;
}

ShockContribution rate_piece(const EntropySolution& sol, const EntropyPair& pair,
                             const ShockState& st, int id) {
  const double T = st.t - sol.t0();
  auto fan = [&](double b) { return (st.x - b) / T; };
  const double ustar = st.speed();
  auto breaks = label_breaks(sol, pair, st.a_minus, st.a_plus, st.x, T);

  ShockContribution c;
  c.shock_id = id;
  c.x = st.x;
  c.u_minus = st.u_minus;
  c.u_plus = st.u_plus;
  c.jump_term =
      integrate_split([&](double b) { return pair.psi(ustar) - pair.psi(fan(b)); },
                      st.a_minus, st.a_plus, breaks) /
      T;
  c.bregman_term = -integrate_split(
                       [&](double b) { return pair.bregman(ustar, fan(b)); }, st.a_minus,
                       st.a_plus, breaks) /
                   T;
  c.contribution = c.jump_term + c.bregman_term;
  return c;
}

std::vector<int> alive_segments(const EntropySolution& sol, double t) {
  // builds (or reuses) a tree with horizon >= t
  const ShockTree& tree = sol.shock_tree(t);
  std::vector<int> ids;
  for (const auto& s : tree.segments)
    if (s.alive_at(t, tree.horizon)) ids.push_back(s.id);
  return ids;
}

}  // namespace

std::string AnomalyReport::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["total"] = total;
  j["shocks"] = nlohmann::json::array();
  for (const auto& s : shocks)
    j["shocks"].push_back({{"shock_id", s.shock_id},
                           {"x", s.x},
                           {"u_minus", s.u_minus},
                           {"u_plus", s.u_plus},
                           {"contribution", s.contribution},
                           {"jump_term", s.jump_term},
                           {"bregman_term", s.bregman_term}});
  return j.dump(2);
}

AnomalyReport lagrangian_anomaly(const EntropySolution& sol, const EntropyPair& pair,
                                 double t) {
  AnomalyReport rep;
  rep.t = t;
  if (t <= sol.first_shock_time() && sol.data().kind() != InitialVelocity::Kind::riemann)
    return rep;
  for (int id : alive_segments(sol, t)) {
    auto st = sol.shock_state(id, t);
    if (st.jump() <= 0.0) continue;
    rep.shocks.push_back(lagrangian_piece(sol, pair, st, id));
    rep.total += rep.shocks.back().contribution;
  }
  return rep;
}

AnomalyReport instantaneous_rate(const EntropySolution& sol, const EntropyPair& pair,
                                 double t) {
  AnomalyReport rep;
  rep.t = t;
  // the rate is one-sided at topology events; insist on an interior time
  const double ev_tol = 1e-9 * (1.0 + std::abs(t));
  for (const auto& seg : sol.shock_tree(t).segments) {
    require(std::abs(t - seg.t_form) > ev_tol, Err::shock_event_at_t,
            "t coincides with a formation or merger time");
    if (seg.parent >= 0)
      require(std::abs(t - seg.t_end) > ev_tol, Err::shock_event_at_t,
              "t coincides with a merger time");
  }
  for (int id : alive_segments(sol, t)) {
    auto st = sol.shock_state(id, t);
    if (st.jump() <= 0.0) continue;
    rep.shocks.push_back(rate_piece(sol, pair, st, id));
    rep.total += rep.shocks.back().contribution;
  }
  return rep;
}

AnomalyReport eulerian_rate(const EntropySolution& sol, const EntropyPair& pair,
                            double t) {
  AnomalyReport rep;
  rep.t = t;
  for (int id : alive_segments(sol, t)) {
    auto st = sol.shock_state(id, t);
    if (st.jump() <= 0.0) continue;
    ShockContribution c;
    c.shock_id = id;
    c.x = st.x;
    c.u_minus = st.u_minus;
    c.u_plus = st.u_plus;
    c.contribution = st.speed() * (pair.psi(st.u_minus) - pair.psi(st.u_plus)) -
                     (pair.flux(st.u_minus) - pair.flux(st.u_plus));
    rep.shocks.push_back(c);
    rep.total += c.contribution;
  }
  return rep;
}

std::vector<std::pair<double, double>> delta_psi_profile(const EntropySolution& sol,
                                                         const EntropyPair& pair,
                                                         int root_segment, double t,
                                                         int n_samples) {
  require(n_samples >= 2, Err::config_invalid, "need at least two sample times");
  const ShockTree& tree = sol.shock_tree(t);
  require(root_segment >= 0 && root_segment < (int)tree.segments.size(),
          Err::config_invalid, "unknown segment id");
  const auto rootst = sol.shock_state(root_segment, t);
  const double Alo = rootst.a_minus, Ahi = rootst.a_plus;
  const double t0 = sol.t0();
  auto members = tree.subtree(root_segment);
  const auto& u0 = sol.data();

  auto psi0_integral = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    auto br = data_corners(u0, lo, hi);
    // for |u|-like entropies, isolate where the data crosses a corner level
    if (pair.psi_has_corners()) {
      for (double v : pair.kink_velocities()) {
        const int n = 64;
        double prev = u0.u(lo) - v;
        for (int i = 1; i <= n; ++i) {
          double ai = lo + (hi - lo) * i / n;
          double cur = u0.u(ai) - v;
          if (prev * cur < 0.0)
            br.push_back(find_root([&](double a) { return u0.u(a) - v; },
                                   lo + (hi - lo) * (i - 1) / n, ai));
          prev = cur;
        }
      }
    }
    return integrate_split([&](double a) { return pair.psi(u0.u(a)); }, lo, hi, br);
  };

  std::vector<std::pair<double, double>> out;
  out.reserve(n_samples);
  const double s_lo = t0 + 1e-6 * (t - t0);
  for (int j = 0; j < n_samples; ++j) {
    double s = s_lo + (t - s_lo) * j / (n_samples - 1);
    // absorbed pieces: members alive at s, each contributing its uniform fan
    double acc = 0.0;
    std::vector<std::pair<double, double>> occupied;
    for (int id : members) {
      const auto& seg = tree.seg(id);
      if (!seg.alive_at(s, tree.horizon) || s <= seg.t_form) continue;
      auto st = sol.shock_state(id, s);
      occupied.emplace_back(st.a_minus, st.a_plus);
      auto breaks = label_breaks(sol, pair, st.a_minus, st.a_plus, st.x, s - t0);
      acc += integrate_split(
          [&](double a) { return pair.psi((st.x - a) / (s - t0)); }, st.a_minus,
          st.a_plus, breaks);
    }
    // complement inside [Alo, Ahi]: still on data characteristics
    std::sort(occupied.begin(), occupied.end());
    double cursor = Alo;
    for (auto& [lo, hi] : occupied) {
      acc += psi0_integral(cursor, std::max(cursor, lo));
      cursor = std::max(cursor, hi);
    }
    acc += psi0_integral(cursor, Ahi);
    out.emplace_back(s, acc);
  }
  return out;
}

}  // namespace burg
