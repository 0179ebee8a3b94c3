#pragma once

// Reference computations for the test suites. None of these call into the
// library's quadrature, root finding or random number generation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace bgev::oracle {

/// Composite Simpson rule with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels = 20000) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Simpson on [lo, inf) through x = lo + s / (1 - s), s in [0, 1).
inline double simpson_to_infinity(const std::function<double(double)>& f, double lo, int panels = 20000) {
  auto g = [&](double s) {
    if (s >= 1.0) return 0.0;
    const double x = lo + s / (1.0 - s);
    return f(x) / ((1.0 - s) * (1.0 - s));
  };
  return simpson(g, 0.0, 1.0, panels);
}

/// Simpson on (-inf, hi] through the mirror of simpson_to_infinity.
inline double simpson_from_minus_infinity(const std::function<double(double)>& f, double hi, int panels = 20000) {
  return simpson_to_infinity([&](double x) { return f(2.0 * hi - x); }, hi, panels);
}

/// Root of an increasing function by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Radical inverse of i in base b.
inline double van_der_corput(std::uint64_t i, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

/// Point `i` (starting at 1) of the Halton sequence in `dims` dimensions.
inline std::vector<double> halton(std::uint64_t i, int dims) {
  static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11, 13};
  std::vector<double> out(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) out[static_cast<std::size_t>(d)] = van_der_corput(i, primes[d]);
  return out;
}

/// One uniform draw inside each of n equal strata of (0, 1), shuffled.
inline std::vector<double> stratified_uniforms(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    do {
      v = unit(gen);
    } while (v == 0.0);
    u[i] = (static_cast<double>(i) + v) / static_cast<double>(n);
  }
  std::shuffle(u.begin(), u.end(), gen);
  return u;
}

/// Sample estimate of E|X - X'| from the order statistics.
inline double gini_mean_difference(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (2.0 * static_cast<double>(i) + 1.0 - n) * x[i];
  return 2.0 * s / (n * (n - 1.0));
}

/// Agreement to `digits` significant digits: |a - b| <= 0.5 * 10^(e - digits + 1), e the exponent of b.
inline bool same_significant_digits(double a, double b, int digits) {
  if (b == 0.0) return a == 0.0;
  const double e = std::floor(std::log10(std::abs(b)));
  return std::abs(a - b) <= 0.5 * std::pow(10.0, e - digits + 1);
}

/// Closed-form GEV CDF written out independently of the library.
inline double gev_cdf(double y, double mu, double sigma, double xi) {
  const double z = (y - mu) / sigma;
  if (xi == 0.0) return std::exp(-std::exp(-z));
  const double h = 1.0 + xi * z;
  if (h <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(h, -1.0 / xi));
}

inline double gev_pdf(double y, double mu, double sigma, double xi) {
  const double z = (y - mu) / sigma;
  if (xi == 0.0) return std::exp(-z - std::exp(-z)) / sigma;
  const double h = 1.0 + xi * z;
  if (h <= 0.0) return 0.0;
  return std::pow(h, -1.0 / xi - 1.0) * std::exp(-std::pow(h, -1.0 / xi)) / sigma;
}

inline double gev_quantile(double p, double mu, double sigma, double xi) {
  if (xi == 0.0) return mu - sigma * std::log(-std::log(p));
  return mu + sigma * (std::pow(-std::log(p), -xi) - 1.0) / xi;
}

}  // namespace bgev::oracle
