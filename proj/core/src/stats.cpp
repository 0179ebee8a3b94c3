#include "bgev/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bgev/errors.hpp"

namespace bgev {

double quantile_sorted(std::span<const double> sorted, double p) {
  detail::require_data(!sorted.empty(), "quantile of empty sample");
  detail::require_domain(p >= 0.0 && p <= 1.0, "quantile probability outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::span<const double> sample, double p) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, p);
}

std::vector<double> empirical_quantiles(std::span<const double> sample, std::span<const double> probs) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back(quantile_sorted(sorted, p));
  return out;
}

double mean(std::span<const double> sample) {
  detail::require_data(!sample.empty(), "mean of empty sample");
  return std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
}

double sample_sd(std::span<const double> sample) {
  detail::require_data(sample.size() >= 2, "standard deviation needs at least two values");
  const double m = mean(sample);
  double ss = 0.0;
  for (double v : sample) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(sample.size() - 1));
}

}  // namespace bgev
