#include "burg/viscous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "burg/errors.hpp"
#include "burg/io.hpp"
#include "burg/numerics.hpp"

namespace burg {

namespace {

// log cosh z = |z| + log(1 + e^{-2|z|}) - log 2, safe for any z
double lncosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453;
}

// potential of the closed single-shock profile: x^2/2t - 2 nu lncosh(Lx/2nut)
double khokh_phi(double L, double nu, double x, double t) {
  return 0.5 * x * x / t - 2.0 * nu * lncosh(0.5 * L * x / (nu * t));
}

using Fn = std::function<double(double)>;

struct Windows {
  double ell_max = 0.0;
  std::vector<std::pair<double, double>> iv;
};

// Scan the log integrand on a uniform grid and keep the runs that come within
// 48 of the scanned max, padded by one cell and merged. Relative to the peak,
// everything discarded is below e^-48; the pad covers a true max sitting
// between nodes.
Windows active_windows(const Fn& ell, double lo, double hi, int cells) {
  const double h = (hi - lo) / cells;
  std::vector<double> v(cells + 1);
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= cells; ++i) {
    v[i] = ell(lo + i * h);
    mx = std::max(mx, v[i]);
  }
  require(std::isfinite(mx), Err::underflow_all_weights,
          "log integrand has no finite values on the scan window");
  Windows w;
  w.ell_max = mx;
  const double cut = mx - 48.0;
  int i = 0;
  while (i <= cells) {
    if (v[i] <= cut) {
      ++i;
      continue;
    }
    int j = i;
    while (j < cells && v[j + 1] > cut) ++j;
    const double a = lo + std::max(0, i - 1) * h;
    const double b = lo + std::min(cells, j + 1) * h;
    if (!w.iv.empty() && a <= w.iv.back().second)
      w.iv.back().second = b;
    else
      w.iv.emplace_back(a, b);
    i = j + 1;
  }
  return w;
}

double window_integral(const Fn& f, const Windows& w,
                       const std::vector<double>& kinks) {
  double total = 0.0;
  for (const auto& [a, b] : w.iv)
    total += integrate_split(f, a, b, kinks, 1e-14, 1e-10);
  return total;
}

}  // namespace

ViscousSolution ViscousSolution::from_initial(InitialVelocity data, double nu,
                                              double t0) {
  require(nu > 0.0, Err::config_invalid, "viscosity must be positive");
  ViscousSolution v(std::move(data));
  v.kind_ = Kind::general;
  v.nu_ = nu;
  v.t0_ = t0;
  return v;
}

ViscousSolution ViscousSolution::khokhlov_profile(double L, double nu,
                                                  double t0) {
  require(L > 0.0 && nu > 0.0 && t0 > 0.0, Err::config_invalid,
          "single-shock profile needs positive L, nu, t0");
  ViscousSolution v(InitialVelocity::sawtooth(L, t0));
  v.kind_ = Kind::khokhlov;
  v.nu_ = nu;
  v.t0_ = t0;
  v.L_ = L;
  return v;
}

double ViscousSolution::data_velocity(double a) const {
  if (kind_ == Kind::khokhlov) return khokhlov_velocity(L_, nu_, a, t0_);
  return u0_.u(a);
}

double ViscousSolution::data_potential(double a) const {
  if (kind_ == Kind::khokhlov) return khokh_phi(L_, nu_, a, t0_) + c0;
  return u0_.phi(a) + c0;
}

double ViscousSolution::potential(double a, double s) const {
  return -2.0 * nu_ * log_weight(a, s);
}

double ViscousSolution::log_weight(double a, double s) const {
  const double g = c0 + (gamma_shift ? gamma_shift(s) : 0.0);
  if (kind_ == Kind::khokhlov)
    return -(khokh_phi(L_, nu_, a, s) + g) / (2.0 * nu_);
  const double st = s - t0_;
  require(st >= -1e-12 * std::max(1.0, std::abs(t0_)), Err::config_invalid,
          "potential requested before the data time");
  if (st <= 1e-13 * std::max(1.0, std::abs(t0_)))
    return -(u0_.phi(a) + g) / (2.0 * nu_);

  // weight at time s as the heat propagation of the data weight; the gauge
  // terms factor out of the integral exactly
  auto ell = [&](double b) {
    const double d = a - b;
    return -d * d / (4.0 * nu_ * st) - u0_.phi(b) / (2.0 * nu_);
  };
  double w = 12.0 * std::sqrt(2.0 * nu_ * st) + 1.0;
  double blo, bhi;
  switch (u0_.kind()) {
    case InitialVelocity::Kind::sawtooth: {
      const double tr = u0_.saw_tref();
      const double c = a * tr / (tr + st);
      const double r = u0_.saw_L() * st / (tr + st) + w;
      blo = c - r;
      bhi = c + r;
      break;
    }
    case InitialVelocity::Kind::linear_ramp: {
      const double m = u0_.ramp_slope();
      require(1.0 + m * st > 0.0, Err::degenerate_data,
              "ramp characteristics focus before s");
      const double c = a / (1.0 + m * st);
      w = 12.0 * std::sqrt(2.0 * nu_ * st / (1.0 + m * st)) + 1.0;
      blo = c - w;
      bhi = c + w;
      break;
    }
    case InitialVelocity::Kind::smooth_sampled: {
      const double B =
          u0_.speed_bound(u0_.table().x_front(), u0_.table().x_back());
      blo = a - B * st - w;
      bhi = a + B * st + w;
      break;
    }
    default: {  // riemann
      const double B =
          u0_.speed_bound(std::min(a, 0.0) - 1.0, std::max(a, 0.0) + 1.0);
      blo = a - B * st - w;
      bhi = a + B * st + w;
      break;
    }
  }
  const Windows win = active_windows(ell, blo, bhi, 512);
  auto f = [&](double b) { return std::exp(ell(b) - win.ell_max); };
  const double m = window_integral(f, win, u0_.kinks());
  require(m > 0.0 && std::isfinite(m), Err::underflow_all_weights,
          "heat integral of the data weight underflowed");
  // the kernel prefactor (4 pi nu st)^{-1/2} keeps the potential normalized
  return win.ell_max + std::log(m) -
         0.5 * std::log(4.0 * M_PI * nu_ * st) - g / (2.0 * nu_);
}

double ViscousSolution::velocity(double x, double t) const {
  if (kind_ == Kind::khokhlov) return khokhlov_velocity(L_, nu_, x, t);
  return hopf_cole_velocity(*this, x, t);
}

std::pair<double, double> ViscousSolution::label_range(double x, double s,
                                                       double t) const {
  const double dt = t - s;
  require(dt > 0.0, Err::config_invalid, "label range needs s < t");
  const double w = 12.0 * std::sqrt(2.0 * nu_ * dt) +
                   12.0 * std::sqrt(2.0 * nu_ * std::max(s - t0_, 0.0)) + 1.0;
  if (kind_ == Kind::khokhlov) {
    // characteristics of the N-wave pass through x s/t; the fan is L wide
    const double c = x * s / t;
    const double r = L_ * dt / t + w;
    return {std::min(c - r, x - w), std::max(c + r, x + w)};
  }
  switch (u0_.kind()) {
    case InitialVelocity::Kind::sawtooth: {
      const double tr = u0_.saw_tref();
      const double c = x * tr / (tr + (t - t0_));
      const double r = u0_.saw_L() + w;
      return {std::min(c, x) - r, std::max(c, x) + r};
    }
    case InitialVelocity::Kind::linear_ramp: {
      const double m = u0_.ramp_slope();
      require(1.0 + m * (t - t0_) > 0.0, Err::degenerate_data,
              "ramp characteristics focus before t");
      const double c = x / (1.0 + m * (t - t0_));
      return {std::min(c, x) - w, std::max(c, x) + w};
    }
    case InitialVelocity::Kind::smooth_sampled: {
      const double B =
          u0_.speed_bound(u0_.table().x_front(), u0_.table().x_back());
      return {x - B * dt - w, x + B * dt + w};
    }
    default: {
      const double B =
          u0_.speed_bound(std::min(x, 0.0) - 1.0, std::max(x, 0.0) + 1.0);
      return {x - B * dt - w, x + B * dt + w};
    }
  }
}

double khokhlov_velocity(double L, double nu, double x, double t) {
  require(t > 0.0 && nu > 0.0, Err::config_invalid,
          "single-shock profile needs t, nu > 0");
  return (x - L * std::tanh(0.5 * L * x / (nu * t))) / t;
}

double hopf_cole_velocity(const ViscousSolution& v, double x, double t) {
  const double dt = t - v.t0();
  require(dt > 0.0, Err::config_invalid, "need t past the data time");
  const double nu = v.nu();
  auto ell = [&](double a) {
    const double d = x - a;
    return -d * d / (4.0 * nu * dt) - v.data_potential(a) / (2.0 * nu);
  };
  const auto [lo, hi] = v.label_range(x, v.t0(), t);
  const Windows win = active_windows(ell, lo, hi, 2048);
  const std::vector<double> kinks =
      v.closed_form() ? std::vector<double>{0.0} : v.data().kinks();
  auto f0 = [&](double a) { return std::exp(ell(a) - win.ell_max); };
  auto f1 = [&](double a) {
    return (x - a) / dt * std::exp(ell(a) - win.ell_max);
  };
  const double m0 = window_integral(f0, win, kinks);
  require(m0 > 0.0 && std::isfinite(m0), Err::underflow_all_weights,
          "all data weights underflowed");
  return window_integral(f1, win, kinks) / m0;
}

TransitionDensity transition_density(const ViscousSolution& v, double s,
                                     double x, double t) {
  require(t > s, Err::config_invalid, "backward density needs s < t");
  require(s >= v.t0() - 1e-12 * std::max(1.0, std::abs(v.t0())),
          Err::config_invalid, "backward density needs s >= data time");
  TransitionDensity d(v);
  d.x_ = x;
  d.t_ = t;
  d.s_ = std::max(s, v.t0());
  const bool at_data =
      d.s_ <= v.t0() + 1e-13 * std::max(1.0, std::abs(v.t0()));
  if (v.closed_form())
    d.kinks_ = {0.0};
  else if (at_data)
    d.kinks_ = v.data().kinks();
  const double nu = v.nu();
  const double dt = t - d.s_;
  auto ell = [&](double a) {
    const double q = x - a;
    return -q * q / (4.0 * nu * dt) + v.log_weight(a, d.s_);
  };
  // each log_weight call past the data time performs its own quadrature;
  // keep the scan coarser there
  const int cells = (v.closed_form() || at_data) ? 2048 : 768;
  const auto [lo, hi] = v.label_range(x, d.s_, t);
  const Windows win = active_windows(ell, lo, hi, cells);
  auto f = [&](double a) { return std::exp(ell(a) - win.ell_max); };
  const double m = window_integral(f, win, d.kinks_);
  require(m > 0.0 && std::isfinite(m), Err::underflow_all_weights,
          "density normalizer underflowed");
  d.log_z_ = win.ell_max + std::log(m);
  d.windows_ = win.iv;
  return d;
}

double TransitionDensity::log_density(double a) const {
  const double q = x_ - a;
  return -q * q / (4.0 * base_.nu() * (t_ - s_)) + base_.log_weight(a, s_) -
         log_z_;
}

double TransitionDensity::density(double a) const {
  return std::exp(log_density(a));
}

double TransitionDensity::mass(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  auto f = [&](double a) { return density(a); };
  std::vector<double> br = kinks_;
  for (const auto& [a, b] : windows_) {
    br.push_back(a);
    br.push_back(b);
  }
  return integrate_split(f, lo, hi, br, 1e-13, 1e-9);
}

double TransitionDensity::normalization() const {
  double m = 0.0;
  for (const auto& [a, b] : windows_) m += mass(a, b);
  for (size_t i = 1; i < windows_.size(); ++i)
    m += mass(windows_[i - 1].second, windows_[i].first);
  return m;
}

double TransitionDensity::velocity_integral() const {
  const bool at_data =
      s_ <= base_.t0() + 1e-13 * std::max(1.0, std::abs(base_.t0()));
  auto us = [&](double a) -> double {
    if (base_.closed_form())
      return khokhlov_velocity(base_.profile_L(), base_.nu(), a, s_);
    if (at_data) return base_.data_velocity(a);
    return hopf_cole_velocity(base_, a, s_);
  };
  double m = 0.0;
  for (const auto& [a, b] : windows_)
    m += integrate_split([&](double q) { return us(q) * density(q); }, a, b,
                         kinks_, 1e-12, 1e-8);
  return m;
}

std::string TransitionDensity::to_csv(const std::vector<double>& grid) const {
  Csv csv({"a", "density", "log_density"});
  for (double a : grid) {
    const double l = log_density(a);
    csv.cell(a).cell(std::exp(l)).cell(l);
    csv.end_row();
  }
  return csv.body();
}

LimitMeasure limit_measure(
    const EntropySolution& limit,
    const std::function<TransitionDensity(double)>& family, double x, double s,
    double t, std::vector<double> nus) {
  require(!nus.empty(), Err::config_invalid, "need at least one viscosity");
  for (double n : nus)
    require(n > 0.0, Err::config_invalid, "viscosities must be positive");
  std::sort(nus.begin(), nus.end(), std::greater<>());
  const double dt = t - s;
  require(dt > 0.0, Err::config_invalid, "limit measure needs s < t");

  const EvalResult ev = limit.evaluate(x, t);
  LimitMeasure lm;
  if (ev.at_shock) {
    lm.atoms.push_back({x - ev.u_left * dt, 0.0, 0.0});
    lm.atoms.push_back({x - ev.u_right * dt, 0.0, 0.0});
  } else {
    lm.atoms.push_back({x - ev.mean() * dt, 0.0, 0.0});
  }

  if (ev.at_shock) {
    // at a formation or merger instant the two-sided picture degenerates and
    // no limit is asserted
    const auto& tree = limit.shock_tree(t + 0.01 * std::max(1.0, std::abs(t)));
    const int id = tree.segment_at(t, x, 1e-6 * std::max(1.0, std::abs(x)));
    if (id >= 0) {
      const ShockSegment& sg = tree.seg(id);
      const double whisker = 1e-9 * std::max(1.0, std::abs(t));
      if (std::abs(t - sg.t_form) < whisker) lm.generic = false;
      if (sg.parent >= 0 && std::abs(t - sg.t_end) < whisker)
        lm.generic = false;
    }
  }

  const double du = ev.at_shock ? ev.u_left - ev.u_right : 0.0;
  const double gap = ev.at_shock ? lm.atoms[1].a - lm.atoms[0].a : 0.0;
  double scale = std::abs(x);
  for (const auto& at : lm.atoms) scale = std::max(scale, std::abs(at.a));
  scale = std::max(scale, 1.0);

  for (double nu : nus) {
    const TransitionDensity d = family(nu);
    // window wide enough for the heat width of the atom mass, shrinking with
    // nu, capped below half the atom separation
    double delta = std::max(1e-3 * scale, 8.0 * std::sqrt(2.0 * nu * dt));
    if (du > 0.0) delta = std::max(delta, 10.0 * nu / du);
    if (ev.at_shock) {
      const double cap = 0.45 * gap;
      if (delta > cap) {
        require(cap >= 2.0 * nu / du, Err::atom_window_overlap,
                "atom separation is inside the viscous shock width");
        delta = cap;
      }
    }
    LimitSample samp;
    samp.nu = nu;
    samp.delta = delta;
    double tot = 0.0;
    for (const auto& at : lm.atoms) {
      const double m = d.mass(at.a - delta, at.a + delta);
      samp.weights.push_back(m);
      tot += m;
    }
    samp.residual = 1.0 - tot;
    lm.per_nu.push_back(std::move(samp));
  }

  const LimitSample& last = lm.per_nu.back();
  for (size_t i = 0; i < lm.atoms.size(); ++i)
    lm.atoms[i].weight = last.weights[i];
  lm.residual = last.residual;
  if (lm.per_nu.size() >= 2) {
    const LimitSample& prev = lm.per_nu[lm.per_nu.size() - 2];
    for (size_t i = 0; i < lm.atoms.size(); ++i) {
      const double slope =
          (prev.weights[i] - last.weights[i]) / (prev.nu - last.nu);
      lm.atoms[i].weight_extrap = last.weights[i] - slope * last.nu;
    }
  } else {
    for (auto& at : lm.atoms) at.weight_extrap = at.weight;
  }
  return lm;
}

std::string LimitMeasure::to_json() const {
  nlohmann::json j;
  j["generic"] = generic;
  j["residual"] = residual;
  j["atoms"] = nlohmann::json::array();
  for (const auto& at : atoms)
    j["atoms"].push_back({{"a", at.a},
                          {"weight", at.weight},
                          {"weight_extrap", at.weight_extrap}});
  j["per_nu"] = nlohmann::json::array();
  for (const auto& samp : per_nu)
    j["per_nu"].push_back({{"nu", samp.nu},
                           {"delta", samp.delta},
                           {"weights", samp.weights},
                           {"residual", samp.residual}});
  return j.dump(2);
}

}  // namespace burg
