#include "burg/stats.hpp"

#include <algorithm>
#include <numeric>

#include "burg/errors.hpp"
#include "burg/numerics.hpp"

namespace burg {

MeanErr mean_sem(std::span<const double> v) {
  MeanErr out;
  out.n = v.size();
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / double(v.size());
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / double(v.size() - 1);
  out.sem = std::sqrt(var / double(v.size()));
  return out;
}

MeanErr jackknife_mean(std::span<const double> v) {
  MeanErr out;
  out.n = v.size();
  require(v.size() >= 2, Err::config_invalid, "jackknife needs n >= 2");
  const double n = double(v.size());
  const double total = pairwise_sum(v);
  out.mean = total / n;
  // leave-one-out means m_i = (total - v_i)/(n-1); error from their spread
  std::vector<double> dev(v.size());
  for (size_t i = 0; i < v.size(); ++i) dev[i] = (total - v[i]) / (n - 1.0);
  const double mbar = pairwise_sum(dev) / n;
  for (auto& d : dev) {
    const double e = d - mbar;
    d = e * e;
  }
  out.sem = std::sqrt((n - 1.0) / n * pairwise_sum(dev));
  return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), Err::config_invalid, "ks on empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double c = cdf(samples[i]);
    d = std::max(d, std::abs(double(i + 1) / n - c));
    d = std::max(d, std::abs(c - double(i) / n));
  }
  return d;
}

Interval binomial_ci(std::size_t k, std::size_t n, double z) {
  require(n > 0 && k <= n, Err::config_invalid, "binomial_ci arguments");
  const double p = double(k) / double(n);
  const double half = z * std::sqrt(p * (1.0 - p) / double(n)) + 0.5 / double(n);
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

std::vector<std::vector<std::size_t>> condition_bins(std::span<const double> key,
                                                     std::size_t min_count) {
  std::vector<std::size_t> order(key.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  std::vector<std::vector<std::size_t>> bins;
  std::vector<std::size_t> rest;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && key[order[j]] == key[order[i]]) ++j;
    if (j - i >= min_count) {
      bins.emplace_back(order.begin() + i, order.begin() + j);  // point mass
    } else {
      rest.insert(rest.end(), order.begin() + i, order.begin() + j);
    }
    i = j;
  }
  // rest is still sorted by key; cut into equal-count bins
  if (!rest.empty()) {
    const size_t nb = std::max<size_t>(1, rest.size() / std::max<size_t>(min_count * 2, 60));
    const size_t per = rest.size() / nb;
    if (per >= min_count) {
      for (size_t b = 0; b < nb; ++b) {
        const size_t lo = b * per;
        const size_t hi = (b + 1 == nb) ? rest.size() : (b + 1) * per;
        bins.emplace_back(rest.begin() + lo, rest.begin() + hi);
      }
    } else if (rest.size() >= min_count) {
      bins.emplace_back(rest.begin(), rest.end());
    }
    // fewer than min_count leftovers are dropped: no bin below the floor
  }
  return bins;
}

}  // namespace burg
