#include "burg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "burg/errors.hpp"

namespace burg {

namespace {
using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;
}

double integrate(const Fn& f, double lo, double hi, double abs_tol, double rel_tol) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  // The library's tolerance is relative to the L1 norm, so cancellation-heavy
  // integrals can stop far from the absolute accuracy we need; escalate once
  // to the practical floor (~1e-11; below that the rule subdivides blindly).
  // First pass runs a decade below rel_tol: the error estimate can undershoot
  // the true error severalfold at coarse depth, so give the gate some margin.
  double err = 0.0, l1 = 0.0;
  double v = GK15::integrate(f, lo, hi, 15, std::max(1e-11, 0.1 * rel_tol), &err, &l1);
  if (err > abs_tol && err > rel_tol * std::max(1.0, std::abs(v)))
    v = GK15::integrate(f, lo, hi, 15, 1e-11, &err, &l1);
  if (err > abs_tol && err > rel_tol * std::max(1.0, std::abs(v))) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "estimated error %.3g", err);
    fail(Err::quadrature_fail, buf);
  }
  return sign * v;
}

double integrate_split(const Fn& f, double lo, double hi,
                       const std::vector<double>& breakpoints,
                       double abs_tol, double rel_tol) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::vector<double> pts{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) pts.push_back(b);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] < 1e-300) continue;
    total += integrate(f, pts[i], pts[i + 1], abs_tol / double(pts.size()), rel_tol);
  }
  return sign * total;
}

double find_root(const Fn& f, double lo, double hi, double tol) {
  require(lo <= hi, Err::root_not_converged, "empty bracket");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require(std::signbit(flo) != std::signbit(fhi), Err::root_not_converged,
          "no sign change on bracket");
  std::uintmax_t it = 200;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, it);
  require(it < 200, Err::root_not_converged, "iteration limit");
  return 0.5 * (r.first + r.second);
}

double golden_min(const Fn& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double m = 0.5 * (a + b);
  return m;
}

std::vector<LocalMin> scan_minima(const Fn& f, double lo, double hi, int cells,
                                  double tol) {
  require(cells >= 8, Err::config_invalid, "scan needs >= 8 cells");
  const double h = (hi - lo) / cells;
  std::vector<double> fv(cells + 1);
  for (int i = 0; i <= cells; ++i) fv[i] = f(lo + i * h);

  std::vector<LocalMin> out;
  auto push = [&](double a, double v, bool boundary) {
    for (auto& m : out)
      if (std::abs(m.a - a) <= std::max(tol, 4.0 * h * 1e-9)) {
        if (v < m.value) { m.a = a; m.value = v; m.at_boundary = boundary; }
        return;
      }
    out.push_back({a, v, boundary});
  };

  for (int i = 1; i < cells; ++i) {
    if (fv[i] <= fv[i - 1] && fv[i] <= fv[i + 1]) {
      double a = golden_min(f, lo + (i - 1) * h, lo + (i + 1) * h, tol);
      push(a, f(a), false);
    }
  }
  if (fv[0] < fv[1]) {
    double a = golden_min(f, lo, lo + h, tol);
    push(a, f(a), std::abs(a - lo) <= 2.0 * tol + h * 1e-6);
  }
  if (fv[cells] < fv[cells - 1]) {
    double a = golden_min(f, hi - h, hi, tol);
    push(a, f(a), std::abs(a - hi) <= 2.0 * tol + h * 1e-6);
  }
  std::sort(out.begin(), out.end(), [](auto& p, auto& q) { return p.a < q.a; });
  return out;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, Err::config_invalid, "fit_line sizes");
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0, Err::config_invalid, "degenerate abscissae");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  require(x_.size() == y_.size() && x_.size() >= 2, Err::config_invalid,
          "interpolant needs >= 2 knots");
  for (size_t i = 0; i + 1 < x_.size(); ++i)
    require(x_[i] < x_[i + 1], Err::config_invalid, "knots must increase");

  const size_t n = x_.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
      m_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  };
  m_[0] = (n == 2) ? d[0] : end_slope(h[0], h[1], d[0], d[1]);
  m_[n - 1] = (n == 2) ? d[0] : end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);

  cum_.assign(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i)
    cum_[i + 1] = cum_[i] + h[i] * (0.5 * (y_[i] + y_[i + 1]) + h[i] * (m_[i] - m_[i + 1]) / 12.0);
}

int Pchip::find(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  int i = int(it - x_.begin()) - 1;
  return std::clamp(i, 0, int(x_.size()) - 2);
}

double Pchip::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const int i = find(x);
  const double h = x_[i + 1] - x_[i];
  const double th = (x - x_[i]) / h;
  const double a = y_[i], b = h * m_[i];
  const double c = -3.0 * y_[i] - 2.0 * h * m_[i] + 3.0 * y_[i + 1] - h * m_[i + 1];
  const double d = 2.0 * y_[i] + h * m_[i] - 2.0 * y_[i + 1] + h * m_[i + 1];
  return a + th * (b + th * (c + th * d));
}

double Pchip::deriv(double x) const {
  if (x < x_.front() || x > x_.back()) return 0.0;
  const int i = find(x);
  const double h = x_[i + 1] - x_[i];
  const double th = (x - x_[i]) / h;
  const double b = h * m_[i];
  const double c = -3.0 * y_[i] - 2.0 * h * m_[i] + 3.0 * y_[i + 1] - h * m_[i + 1];
  const double d = 2.0 * y_[i] + h * m_[i] - 2.0 * y_[i + 1] + h * m_[i + 1];
  return (b + th * (2.0 * c + th * 3.0 * d)) / h;
}

double Pchip::piece_integral(int i, double theta) const {
  const double h = x_[i + 1] - x_[i];
  const double a = y_[i], b = h * m_[i];
  const double c = -3.0 * y_[i] - 2.0 * h * m_[i] + 3.0 * y_[i + 1] - h * m_[i + 1];
  const double d = 2.0 * y_[i] + h * m_[i] - 2.0 * y_[i + 1] + h * m_[i + 1];
  return h * theta * (a + theta * (b / 2.0 + theta * (c / 3.0 + theta * d / 4.0)));
}

double Pchip::integral(double lo, double hi) const {
  if (hi < lo) return -integral(hi, lo);
  auto anti = [&](double x) {  // integral from x_.front() to x
    if (x <= x_.front()) return y_.front() * (x - x_.front());
    if (x >= x_.back()) return cum_.back() + y_.back() * (x - x_.back());
    const int i = find(x);
    return cum_[i] + piece_integral(i, (x - x_[i]) / (x_[i + 1] - x_[i]));
  };
  return anti(hi) - anti(lo);
}

}  // namespace burg
