#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace burg {

struct MeanErr {
  double mean = 0.0;
  double sem = 0.0;
  std::size_t n = 0;
};

MeanErr mean_sem(std::span<const double> v);

// Jackknife (leave-one-out) standard error of the sample mean.
MeanErr jackknife_mean(std::span<const double> v);

// Two-sided Kolmogorov-Smirnov distance between samples and a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// 1% critical value for the one-sample K-S statistic.
inline double ks_threshold_1pct(std::size_t n) { return 1.6276 / std::sqrt(double(n)); }

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool contains(double p) const { return p >= lo && p <= hi; }
};

// Normal-approximation binomial interval with continuity correction,
// z standard deviations wide.
Interval binomial_ci(std::size_t k, std::size_t n, double z);

// Conditioning bins on a key: exact repeated values with at least min_count
// copies form their own bin (point masses); the rest are split into
// equal-count quantile bins of at least min_count samples.
std::vector<std::vector<std::size_t>> condition_bins(std::span<const double> key,
                                                     std::size_t min_count);

}  // namespace burg
