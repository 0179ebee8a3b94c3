#pragma once

#include <span>
#include <vector>

namespace bgev {

/// Empirical quantile with linear interpolation between order statistics
/// (the "type 7" rule): h = (n - 1) p, result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be in ascending order.
double quantile_sorted(std::span<const double> sorted, double p);

/// Type-7 quantile of an unsorted sample.
double empirical_quantile(std::span<const double> sample, double p);

/// Several type-7 quantiles with a single sort.
std::vector<double> empirical_quantiles(std::span<const double> sample, std::span<const double> probs);

double mean(std::span<const double> sample);

/// Sample standard deviation with the n - 1 denominator.
double sample_sd(std::span<const double> sample);

}  // namespace bgev
