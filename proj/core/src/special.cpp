#include "bgev/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bgev/errors.hpp"

namespace bgev::special {
namespace {

constexpr double kCfTolerance = 1e-14;
constexpr int kCfMaxIterations = 500;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kCfTolerance) return h;
  }
  return h;
}

}  // namespace

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double incomplete_beta(double x, double a, double b) {
  detail::require_domain(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b),
                         "incomplete_beta: shapes must be positive and finite");
  return incomplete_beta(x, a, b, log_beta(a, b));
}

double incomplete_beta(double x, double a, double b, double log_beta_ab) {
  detail::require_domain(!std::isnan(x), "incomplete_beta: x is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta_ab;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double beta_density(double x, double a, double b) {
  detail::require_domain(a > 0.0 && b > 0.0, "beta_density: shapes must be positive");
  return beta_density(x, a, b, log_beta(a, b));
}

double beta_density(double x, double a, double b, double log_beta_ab) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? b : 0.0);
  if (x == 1.0) return b < 1.0 ? std::numeric_limits<double>::infinity() : (b == 1.0 ? a : 0.0);
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_ab);
}

double upper_incomplete_gamma(double x, double alpha) {
  detail::require_domain(std::isfinite(x) && std::isfinite(alpha),
                         "upper_incomplete_gamma: non-finite argument");
  detail::require_domain(alpha > 0.0, "upper_incomplete_gamma: alpha must be positive");
  detail::require_domain(x >= 0.0, "upper_incomplete_gamma: x must be non-negative");
  return boost::math::tgamma(alpha, x);
}

double lower_incomplete_gamma(double x, double alpha) {
  detail::require_domain(std::isfinite(x) && std::isfinite(alpha),
                         "lower_incomplete_gamma: non-finite argument");
  detail::require_domain(alpha > 0.0, "lower_incomplete_gamma: alpha must be positive");
  detail::require_domain(x >= 0.0, "lower_incomplete_gamma: x must be non-negative");
  return boost::math::tgamma_lower(alpha, x);
}

double exponential_integral_ei(double x) {
  detail::require_domain(std::isfinite(x), "exponential_integral_ei: non-finite argument");
  detail::require_domain(x != 0.0, "exponential_integral_ei: pole at 0");
  return boost::math::expint(x);
}

double digamma(double x) {
  detail::require_domain(std::isfinite(x), "digamma: non-finite argument");
  detail::require_domain(!(x <= 0.0 && x == std::floor(x)), "digamma: pole at non-positive integer");
  return boost::math::digamma(x);
}

}  // namespace bgev::special
