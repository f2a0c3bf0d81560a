#ifndef HARDCORE_STATS_HPP
#define HARDCORE_STATS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace hardcore::stats {

/// Pairwise summation; the result depends only on the order of xs.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const auto half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [m](double x) { return (x - m) * (x - m); });
  return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

inline double std_error(std::span<const double> xs) {
  return xs.size() < 2 ? 0.0 : std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

/// Large-sample standard error of the sample variance, sqrt((m4 - s^4) / n).
inline double variance_std_error(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  std::vector<double> q(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (xs[i] - m) * (xs[i] - m);
    sq[i] = d;
    q[i] = d * d;
  }
  const double m2 = pairwise_sum(sq) / static_cast<double>(n);
  const double m4 = pairwise_sum(q) / static_cast<double>(n);
  return std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(n));
}

/// Linear-interpolation quantile (type 7) of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace hardcore::stats

#endif  // HARDCORE_STATS_HPP
