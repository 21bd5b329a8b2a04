#pragma once

#include <functional>
#include <span>
#include <vector>

namespace burg {

inline constexpr double kQuadAbsTol = 1e-10;
inline constexpr double kQuadRelTol = 1e-8;
inline constexpr double kLabelTol = 1e-10;

using Fn = std::function<double(double)>;

// Adaptive 15-point Gauss-Kronrod on [lo, hi].
double integrate(const Fn& f, double lo, double hi,
                 double abs_tol = kQuadAbsTol, double rel_tol = kQuadRelTol);

// Same, but the interval is first split at the interior breakpoints
// (integrand kinks, shock labels) so adaptivity never straddles one.
double integrate_split(const Fn& f, double lo, double hi,
                       const std::vector<double>& breakpoints,
                       double abs_tol = kQuadAbsTol, double rel_tol = kQuadRelTol);

// Bracketed root to |interval| <= tol; requires a sign change on [lo, hi].
double find_root(const Fn& f, double lo, double hi, double tol = kLabelTol);

// Golden-section argmin on [lo, hi] to |interval| <= tol.
double golden_min(const Fn& f, double lo, double hi, double tol = kLabelTol);

struct LocalMin {
  double a;
  double value;
  bool at_boundary = false;
};

// Uniform scan with `cells` cells plus golden refinement of every valley.
// Boundary minima are reported with at_boundary so callers can widen.
std::vector<LocalMin> scan_minima(const Fn& f, double lo, double hi, int cells,
                                  double tol);

// Order-independent reduction (pairwise summation).
double pairwise_sum(std::span<const double> v);

// log cosh z = |z| + log(1 + e^{-2|z|}) - log 2, safe for any z
double log_cosh(double z);

struct LineFit {
  double slope, intercept, r2;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Monotonicity-limited piecewise cubic (Fritsch-Carlson slopes). Constant
// extension outside the knot range; integral is exact per piece.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double deriv(double x) const;
  double integral(double lo, double hi) const;

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return m_; }

 private:
  std::vector<double> x_, y_, m_;
  std::vector<double> cum_;  // integral from x_[0] to x_[i]
  int find(double x) const;
  double piece_integral(int i, double theta) const;  // from x_[i], theta in [0,1]
};

}  // namespace burg
